#pragma once

#include "lm2m/util/bytes.hpp"

#include <array>
#include <memory>

namespace lm2m::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);

/// Streaming SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(ByteView data);
    Digest finish();
    /// Copy of the running state, for hashing many messages sharing a prefix.
    Sha256 clone() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Digest hmac_sha256(ByteView key, ByteView data);

/// Bytes from the OS CSPRNG.
Bytes random_bytes(std::size_t n);

std::string base64url_encode(ByteView data);

/// Unpadded base64url. Throws std::invalid_argument on bad input.
Bytes base64url_decode(std::string_view text);

} // namespace lm2m::crypto
