#pragma once

#include "lm2m/util/bytes.hpp"

#include <string>
#include <variant>

namespace lm2m::wire {

/// Typed resource payload. Wire form: one kind byte, then the value in
/// canonical form (Text and Opaque length-prefixed, Integer and Float as
/// 8 big-endian bytes).
class ResourceValue {
public:
    enum class Kind : std::uint8_t { None = 0, Text = 1, Integer = 2, Float = 3, Opaque = 4 };

    ResourceValue() = default;
    static ResourceValue text(std::string v) { return ResourceValue(std::move(v)); }
    static ResourceValue integer(std::int64_t v) { return ResourceValue(v); }
    static ResourceValue number(double v) { return ResourceValue(v); }
    static ResourceValue opaque(Bytes v) { return ResourceValue(std::move(v)); }

    Kind kind() const { return static_cast<Kind>(value_.index()); }

    const std::string& as_text() const { return std::get<std::string>(value_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
    double as_float() const { return std::get<double>(value_); }
    const Bytes& as_opaque() const { return std::get<Bytes>(value_); }

    Bytes encode() const;
    /// Throws WireError{BadValue}.
    static ResourceValue decode(ByteView data);

    /// Human-readable rendering used in event streams and JSON.
    std::string display() const;

    bool operator==(const ResourceValue&) const = default;

private:
    using Storage = std::variant<std::monostate, std::string, std::int64_t, double, Bytes>;
    template <typename T>
    explicit ResourceValue(T v) : value_(std::move(v))
    {
    }

    Storage value_;
};

std::string_view to_string(ResourceValue::Kind k);

} // namespace lm2m::wire
