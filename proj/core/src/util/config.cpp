#include "lm2m/util/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace lm2m {

namespace {

std::string trim(std::string_view s)
{
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

std::uint64_t parse_u64(std::string_view text)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not an unsigned integer: '" + std::string(text) + "'");
    }
    return v;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text)
{
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
        }
        cfg.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

KeyValueConfig& KeyValueConfig::overlay_env(std::string_view prefix)
{
    for (char** env = environ; env != nullptr && *env != nullptr; ++env) {
        std::string_view entry(*env);
        if (entry.substr(0, prefix.size()) != prefix) continue;
        auto eq = entry.find('=');
        if (eq == std::string_view::npos || eq <= prefix.size()) continue;
        set(std::string(entry.substr(prefix.size(), eq - prefix.size())), std::string(entry.substr(eq + 1)));
    }
    return *this;
}

void KeyValueConfig::set(std::string key, std::string value) { entries_[lower(std::move(key))] = std::move(value); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const
{
    auto it = entries_.find(lower(std::string(key)));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_or(std::string_view key, std::string fallback) const
{
    return get(key).value_or(std::move(fallback));
}

std::uint64_t KeyValueConfig::get_u64_or(std::string_view key, std::uint64_t fallback) const
{
    auto v = get(key);
    return v ? parse_u64(*v) : fallback;
}

} // namespace lm2m
