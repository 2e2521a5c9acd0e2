#include "lm2m/sim/psk_file.hpp"

#include "lm2m/contracts/records.hpp"

#include <fstream>
#include <sstream>

namespace lm2m::sim {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<PskEntry> parse_psk_file(std::string_view text)
{
    std::vector<PskEntry> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        auto bad = [&](const std::string& why) {
            return std::invalid_argument("psk file line " + std::to_string(line_no) + ": " + why);
        };
        auto c1 = line.find(',');
        auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
            throw bad("expected endpoint,identity,hex-secret");
        PskEntry e{std::string(trim(line.substr(0, c1))), std::string(trim(line.substr(c1 + 1, c2 - c1 - 1))), {}};
        if (e.endpoint.empty() || e.identity.empty())
            throw bad("empty endpoint or identity");
        try {
            e.secret = from_hex(trim(line.substr(c2 + 1)));
        } catch (const std::exception&) {
            throw bad("secret is not hex");
        }
        if (e.secret.size() < contracts::kMinPskSecret || e.secret.size() > contracts::kMaxPskSecret)
            throw bad("secret must be 16 to 64 bytes");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<PskEntry> load_psk_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read psk file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_psk_file(ss.str());
}

std::string format_psk_file(const std::vector<PskEntry>& entries)
{
    std::string out;
    for (const auto& e : entries)
        out += e.endpoint + "," + e.identity + "," + to_hex(e.secret) + "\n";
    return out;
}

const PskEntry* find_psk(const std::vector<PskEntry>& entries, std::string_view endpoint)
{
    for (const auto& e : entries)
        if (e.endpoint == endpoint)
            return &e;
    return nullptr;
}

} // namespace lm2m::sim
