#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace lm2m::wire {

/// Object / instance / resource address, text form "/obj[/inst[/res]]".
struct Path {
    std::uint16_t object = 0;
    std::optional<std::uint16_t> instance;
    std::optional<std::uint16_t> resource;

    static Path resource_path(std::uint16_t obj, std::uint16_t inst, std::uint16_t res) { return {obj, inst, res}; }

    /// Canonical form only: no leading zeros, no trailing slash. Throws WireError{BadPath}.
    static Path parse(std::string_view text);
    static std::optional<Path> try_parse(std::string_view text);

    std::string to_string() const;
    bool is_resource() const { return resource.has_value(); }

    auto operator<=>(const Path&) const = default;
};

} // namespace lm2m::wire
