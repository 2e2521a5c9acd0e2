#include "lm2m/ledger/journal.hpp"

#include <fstream>
#include <stdexcept>

namespace lm2m::ledger::journal {

Bytes frame(const Block& block)
{
    const auto body = block.serialize();
    codec::Writer w;
    w.u32(static_cast<std::uint32_t>(body.size())).raw(body);
    return w.take();
}

ParseResult parse(ByteView data, bool strict)
{
    ParseResult out;
    std::size_t pos = 0;
    while (pos < data.size()) {
        const auto height = out.blocks.size();
        if (data.size() - pos < 4) {
            if (strict) out.error = "truncated frame header at block " + std::to_string(height);
            break;
        }
        const std::uint32_t len = (std::uint32_t{data[pos]} << 24) | (std::uint32_t{data[pos + 1]} << 16) |
                                  (std::uint32_t{data[pos + 2]} << 8) | data[pos + 3];
        if (data.size() - pos - 4 < len) {
            if (strict) out.error = "truncated frame at block " + std::to_string(height);
            break;
        }
        try {
            out.blocks.push_back(Block::deserialize(data.subspan(pos + 4, len)));
        } catch (const codec::DecodeError& e) {
            out.error = "malformed block " + std::to_string(height) + ": " + e.what();
            break;
        }
        pos += 4 + len;
        out.consumed = pos;
    }
    return out;
}

void append(const std::filesystem::path& path, const Block& block)
{
    const auto bytes = frame(block);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open journal " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("journal write failed: " + path.string());
}

Bytes read_file(const std::filesystem::path& path, std::size_t offset)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    if (offset >= size) return {};
    in.seekg(static_cast<std::streamoff>(offset));
    Bytes out(size - offset);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    out.resize(static_cast<std::size_t>(in.gcount()));
    return out;
}

} // namespace lm2m::ledger::journal
