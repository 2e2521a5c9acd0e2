#include "lm2m/util/codec.hpp"

#include <bit>
#include <cstring>

namespace lm2m::codec {

Writer& Writer::u8(std::uint8_t v)
{
    buf_.push_back(v);
    return *this;
}

Writer& Writer::u16(std::uint16_t v)
{
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

Writer& Writer::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

Writer& Writer::bytes(ByteView v)
{
    if (v.size() > 0xffffffffull) throw std::length_error("byte string too long for 32-bit length prefix");
    u32(static_cast<std::uint32_t>(v.size()));
    return raw(v);
}

Writer& Writer::raw(ByteView v)
{
    buf_.insert(buf_.end(), v.begin(), v.end());
    return *this;
}

void Reader::need(std::size_t n) const
{
    if (remaining() < n) throw DecodeError("truncated input");
}

std::uint8_t Reader::u8()
{
    need(1);
    return data_[pos_++];
}

std::uint16_t Reader::u16()
{
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
}

std::uint32_t Reader::u32()
{
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
}

std::uint64_t Reader::u64()
{
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 8;
    return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

bool Reader::boolean()
{
    const auto v = u8();
    if (v > 1) throw DecodeError("invalid boolean");
    return v == 1;
}

Bytes Reader::bytes()
{
    const auto len = u32();
    auto v = raw(len);
    return Bytes(v.begin(), v.end());
}

std::string Reader::str()
{
    const auto len = u32();
    auto v = raw(len);
    if (!is_valid_utf8(v)) throw DecodeError("invalid UTF-8 string");
    return std::string(v.begin(), v.end());
}

ByteView Reader::raw(std::size_t n)
{
    need(n);
    auto v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
}

void Reader::expect_end() const
{
    if (!done()) throw DecodeError("trailing bytes");
}

} // namespace lm2m::codec
