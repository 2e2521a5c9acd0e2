#pragma once

// PSK session handshake and the seal/open integrity layer.
//
//   HELLO      POST /hs/1   identity, client_nonce
//   CHALLENGE  POST /hs/2   server_nonce, proof_s = HMAC(psk, cn || sn || "server")
//   FINISH     POST /hs/3   proof_c = HMAC(psk, sn || cn || "client")
//
// session_key = HMAC(psk, cn || sn || "session"). Sealed datagrams carry the
// first 8 bytes of HMAC(session_key, message) as a trailer. This gives
// integrity and peer authentication only; payloads travel in the clear.

#include "lm2m/util/bytes.hpp"
#include "lm2m/util/crypto.hpp"

#include <array>
#include <chrono>
#include <stdexcept>
#include <string>

namespace lm2m::wire {

using crypto::Digest;

inline constexpr std::size_t kNonceSize = 16;
inline constexpr std::size_t kTagSize = 8;
inline constexpr std::string_view kHelloPath = "/hs/1";
inline constexpr std::string_view kChallengePath = "/hs/2";
inline constexpr std::string_view kFinishPath = "/hs/3";
inline constexpr std::chrono::milliseconds kHandshakeTimeout{10'000};

using Nonce = std::array<std::uint8_t, kNonceSize>;

bool is_handshake_path(std::string_view path);

struct PskSession {
    std::string peer_identity;
    Digest session_key{};
    Nonce client_nonce{};
    Nonce server_nonce{};
    bool established = false;
};

enum class HandshakeErrc { UnknownIdentity, BadProof, Timeout, Protocol };
std::string_view to_string(HandshakeErrc c);

class HandshakeError : public std::runtime_error {
public:
    explicit HandshakeError(HandshakeErrc code)
        : std::runtime_error(std::string(to_string(code))), code_(code)
    {
    }
    HandshakeErrc code() const { return code_; }

private:
    HandshakeErrc code_;
};

Digest server_proof(ByteView psk, const Nonce& cn, const Nonce& sn);
Digest client_proof(ByteView psk, const Nonce& cn, const Nonce& sn);
Digest session_key(ByteView psk, const Nonce& cn, const Nonce& sn);

struct Hello {
    std::string identity;
    Nonce client_nonce{};
    Bytes encode() const;
    static Hello decode(ByteView data); // throws HandshakeError{Protocol}
};

struct Challenge {
    Nonce server_nonce{};
    Digest proof{};
    Bytes encode() const;
    static Challenge decode(ByteView data);
};

struct Finish {
    Digest proof{};
    Bytes encode() const;
    static Finish decode(ByteView data);
};

/// Client side. The FINISH is produced before the server proof is checked so
/// that a wrong local key is reported by the responder; complete() then
/// verifies the server.
class HandshakeInitiator {
public:
    HandshakeInitiator(std::string identity, Bytes psk);
    HandshakeInitiator(std::string identity, Bytes psk, const Nonce& client_nonce);

    Hello hello() const;
    Finish on_challenge(const Challenge& c);
    /// Throws HandshakeError{BadProof} when the server proof was wrong.
    PskSession complete() const;

private:
    std::string identity_;
    Bytes psk_;
    Nonce cn_{};
    Nonce sn_{};
    bool server_ok_ = false;
    bool challenged_ = false;
};

/// Server side state for one in-flight handshake.
class HandshakeResponder {
public:
    using Clock = std::chrono::steady_clock;

    HandshakeResponder(const Hello& hello, Bytes psk, Clock::time_point now);
    HandshakeResponder(const Hello& hello, Bytes psk, Clock::time_point now, const Nonce& server_nonce);

    const Challenge& challenge() const { return challenge_; }
    /// Throws HandshakeError{BadProof | Timeout}.
    PskSession on_finish(const Finish& f, Clock::time_point now) const;
    bool expired(Clock::time_point now) const { return now - started_ > kHandshakeTimeout; }

private:
    std::string identity_;
    Bytes psk_;
    Nonce cn_{};
    Challenge challenge_;
    Clock::time_point started_;
};

/// Requires an established session; throws std::logic_error otherwise.
Bytes seal(ByteView msg, const PskSession& session);
/// Throws WireError{BadTag}.
Bytes open(ByteView sealed, const PskSession& session);

} // namespace lm2m::wire
