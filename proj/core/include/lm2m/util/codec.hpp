#pragma once

// Canonical serialization shared by the ledger, the contracts and the wire
// payloads: fields in declaration order, big-endian fixed-width integers,
// strings and byte strings carry a 4-byte big-endian length prefix.

#include "lm2m/util/bytes.hpp"

#include <array>
#include <stdexcept>

namespace lm2m::codec {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Writer {
public:
    Writer& u8(std::uint8_t v);
    Writer& u16(std::uint16_t v);
    Writer& u32(std::uint32_t v);
    Writer& u64(std::uint64_t v);
    Writer& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    Writer& f64(double v);
    Writer& boolean(bool v) { return u8(v ? 1 : 0); }
    /// Length-prefixed byte string.
    Writer& bytes(ByteView v);
    /// Length-prefixed UTF-8 string.
    Writer& str(std::string_view v) { return bytes(as_view(v)); }
    /// Raw bytes, no prefix.
    Writer& raw(ByteView v);

    template <std::size_t N>
    Writer& fixed(const std::array<std::uint8_t, N>& v)
    {
        return raw(ByteView(v.data(), N));
    }

    const Bytes& data() const& { return buf_; }
    Bytes take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    Bytes buf_;
};

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    bool boolean();
    Bytes bytes();
    /// Rejects invalid UTF-8.
    std::string str();
    ByteView raw(std::size_t n);

    template <std::size_t N>
    std::array<std::uint8_t, N> fixed()
    {
        std::array<std::uint8_t, N> out{};
        auto v = raw(N);
        std::copy(v.begin(), v.end(), out.begin());
        return out;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }
    /// Throws DecodeError when unread bytes remain.
    void expect_end() const;

private:
    void need(std::size_t n) const;

    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace lm2m::codec
