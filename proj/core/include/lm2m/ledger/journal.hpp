#pragma once

// Chain journal: concatenated canonical block serializations, each preceded
// by a 4-byte big-endian length.

#include "lm2m/ledger/types.hpp"

#include <filesystem>
#include <optional>

namespace lm2m::ledger::journal {

Bytes frame(const Block& block);

struct ParseResult {
    std::vector<Block> blocks;
    /// Bytes covered by the returned blocks.
    std::size_t consumed = 0;
    /// Set when a frame is malformed (or, in strict mode, truncated).
    std::optional<std::string> error;
};

/// In strict mode a partial trailing frame is an error; otherwise parsing
/// stops before it so a follower can pick it up once fully written.
ParseResult parse(ByteView data, bool strict);

/// Appends and flushes one framed block.
void append(const std::filesystem::path& path, const Block& block);

/// Returns empty when the file does not exist.
Bytes read_file(const std::filesystem::path& path, std::size_t offset = 0);

} // namespace lm2m::ledger::journal
