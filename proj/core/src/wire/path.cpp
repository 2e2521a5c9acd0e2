#include "lm2m/wire/path.hpp"

#include "lm2m/wire/errors.hpp"

#include <vector>

namespace lm2m::wire {

std::string_view to_string(WireErrc c)
{
    switch (c) {
    case WireErrc::Truncated: return "Truncated";
    case WireErrc::BadVersion: return "BadVersion";
    case WireErrc::BadCode: return "BadCode";
    case WireErrc::BadType: return "BadType";
    case WireErrc::BadToken: return "BadToken";
    case WireErrc::BadObserve: return "BadObserve";
    case WireErrc::BadPath: return "BadPath";
    case WireErrc::BadValue: return "BadValue";
    case WireErrc::TrailingBytes: return "TrailingBytes";
    case WireErrc::PathTooLong: return "PathTooLong";
    case WireErrc::PayloadTooLong: return "PayloadTooLong";
    case WireErrc::TokenTooLong: return "TokenTooLong";
    case WireErrc::BadTag: return "BadTag";
    }
    return "Unknown";
}

namespace {

std::optional<std::uint16_t> parse_segment(std::string_view s)
{
    if (s.empty() || s.size() > 5) return std::nullopt;
    if (s.size() > 1 && s[0] == '0') return std::nullopt;
    std::uint32_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    if (v > 0xffff) return std::nullopt;
    return static_cast<std::uint16_t>(v);
}

} // namespace

std::optional<Path> Path::try_parse(std::string_view text)
{
    if (text.empty() || text[0] != '/') return std::nullopt;
    std::vector<std::uint16_t> parts;
    std::size_t pos = 1;
    while (true) {
        const auto slash = text.find('/', pos);
        const auto seg = text.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
        auto v = parse_segment(seg);
        if (!v) return std::nullopt;
        parts.push_back(*v);
        if (parts.size() > 3) return std::nullopt;
        if (slash == std::string_view::npos) break;
        pos = slash + 1;
    }
    Path p;
    p.object = parts[0];
    if (parts.size() > 1) p.instance = parts[1];
    if (parts.size() > 2) p.resource = parts[2];
    return p;
}

Path Path::parse(std::string_view text)
{
    auto p = try_parse(text);
    if (!p) throw WireError(WireErrc::BadPath, "invalid object path '" + std::string(text) + "'");
    return *p;
}

std::string Path::to_string() const
{
    std::string s = "/" + std::to_string(object);
    if (instance) {
        s += "/" + std::to_string(*instance);
        if (resource) s += "/" + std::to_string(*resource);
    }
    return s;
}

} // namespace lm2m::wire
