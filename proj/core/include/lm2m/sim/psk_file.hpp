#pragma once

#include "lm2m/util/bytes.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lm2m::sim {

/// One line of a PSK file: `endpoint,identity,hex-secret`.
struct PskEntry {
    std::string endpoint;
    std::string identity;
    Bytes secret;
};

/// Blank lines and lines starting with '#' are skipped. Throws
/// std::invalid_argument naming the offending line.
std::vector<PskEntry> parse_psk_file(std::string_view text);
std::vector<PskEntry> load_psk_file(const std::filesystem::path& path);
std::string format_psk_file(const std::vector<PskEntry>& entries);

const PskEntry* find_psk(const std::vector<PskEntry>& entries, std::string_view endpoint);

} // namespace lm2m::sim
