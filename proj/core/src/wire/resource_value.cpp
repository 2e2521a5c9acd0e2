#include "lm2m/wire/resource_value.hpp"

#include "lm2m/util/codec.hpp"
#include "lm2m/wire/errors.hpp"

#include <cstdio>

namespace lm2m::wire {

Bytes ResourceValue::encode() const
{
    codec::Writer w;
    w.u8(static_cast<std::uint8_t>(kind()));
    switch (kind()) {
    case Kind::None: break;
    case Kind::Text: w.str(as_text()); break;
    case Kind::Integer: w.i64(as_integer()); break;
    case Kind::Float: w.f64(as_float()); break;
    case Kind::Opaque: w.bytes(as_opaque()); break;
    }
    return w.take();
}

ResourceValue ResourceValue::decode(ByteView data)
{
    try {
        codec::Reader r(data);
        ResourceValue v;
        switch (r.u8()) {
        case 0: break;
        case 1: v = text(r.str()); break;
        case 2: v = integer(r.i64()); break;
        case 3: v = number(r.f64()); break;
        case 4: v = opaque(r.bytes()); break;
        default: throw WireError(WireErrc::BadValue, "unknown resource value kind");
        }
        r.expect_end();
        return v;
    } catch (const codec::DecodeError& e) {
        throw WireError(WireErrc::BadValue, e.what());
    }
}

std::string ResourceValue::display() const
{
    switch (kind()) {
    case Kind::None: return "";
    case Kind::Text: return as_text();
    case Kind::Integer: return std::to_string(as_integer());
    case Kind::Float: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", as_float());
        return buf;
    }
    case Kind::Opaque: return to_hex(as_opaque());
    }
    return "";
}

std::string_view to_string(ResourceValue::Kind k)
{
    switch (k) {
    case ResourceValue::Kind::None: return "None";
    case ResourceValue::Kind::Text: return "Text";
    case ResourceValue::Kind::Integer: return "Integer";
    case ResourceValue::Kind::Float: return "Float";
    case ResourceValue::Kind::Opaque: return "Opaque";
    }
    return "Unknown";
}

} // namespace lm2m::wire
