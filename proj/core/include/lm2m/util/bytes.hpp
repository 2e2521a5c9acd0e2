#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lm2m {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Lowercase hex, two characters per byte.
std::string to_hex(ByteView data);

/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

inline ByteView as_view(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Comparison whose running time depends only on the lengths.
bool constant_time_equal(ByteView a, ByteView b);

bool is_valid_utf8(ByteView data);

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_subsequence(ByteView haystack, ByteView needle);

} // namespace lm2m
