#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace lm2m {

/// `key = value` configuration with environment overrides.
///
/// Lines starting with `#` are comments. Keys are case-insensitive and stored
/// lowercase. `overlay_env("LM2M_CHAIN_")` maps `LM2M_CHAIN_BLOCK_INTERVAL_MS`
/// onto key `block_interval_ms`.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    /// Throws std::runtime_error when the file cannot be read.
    static KeyValueConfig load(const std::filesystem::path& path);

    KeyValueConfig& overlay_env(std::string_view prefix);
    void set(std::string key, std::string value);

    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string fallback) const;
    /// Throws std::invalid_argument when present but not an unsigned integer.
    std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

std::uint64_t parse_u64(std::string_view text);

} // namespace lm2m
