#include "lm2m/wire/psk.hpp"

#include "lm2m/util/codec.hpp"
#include "lm2m/wire/errors.hpp"

#include <algorithm>
#include <cstring>

namespace lm2m::wire {

namespace {

Digest proof(ByteView psk, const Nonce& a, const Nonce& b, std::string_view label)
{
    Bytes msg;
    msg.reserve(2 * kNonceSize + label.size());
    msg.insert(msg.end(), a.begin(), a.end());
    msg.insert(msg.end(), b.begin(), b.end());
    msg.insert(msg.end(), label.begin(), label.end());
    return crypto::hmac_sha256(psk, msg);
}

Nonce random_nonce()
{
    Nonce n{};
    auto r = crypto::random_bytes(kNonceSize);
    std::copy(r.begin(), r.end(), n.begin());
    return n;
}

template <typename F>
auto parse(ByteView data, F&& f)
{
    try {
        codec::Reader r(data);
        auto out = f(r);
        r.expect_end();
        return out;
    } catch (const codec::DecodeError&) {
        throw HandshakeError(HandshakeErrc::Protocol);
    }
}

} // namespace

bool is_handshake_path(std::string_view path) { return path.rfind("/hs/", 0) == 0; }

std::string_view to_string(HandshakeErrc c)
{
    switch (c) {
    case HandshakeErrc::UnknownIdentity: return "unknown identity";
    case HandshakeErrc::BadProof: return "bad proof";
    case HandshakeErrc::Timeout: return "handshake timeout";
    case HandshakeErrc::Protocol: return "malformed handshake message";
    }
    return "handshake error";
}

Digest server_proof(ByteView psk, const Nonce& cn, const Nonce& sn) { return proof(psk, cn, sn, "server"); }
Digest client_proof(ByteView psk, const Nonce& cn, const Nonce& sn) { return proof(psk, sn, cn, "client"); }
Digest session_key(ByteView psk, const Nonce& cn, const Nonce& sn) { return proof(psk, cn, sn, "session"); }

Bytes Hello::encode() const { return codec::Writer().str(identity).fixed(client_nonce).take(); }

Hello Hello::decode(ByteView data)
{
    return parse(data, [](codec::Reader& r) {
        Hello h;
        h.identity = r.str();
        h.client_nonce = r.fixed<kNonceSize>();
        return h;
    });
}

Bytes Challenge::encode() const { return codec::Writer().fixed(server_nonce).fixed(proof).take(); }

Challenge Challenge::decode(ByteView data)
{
    return parse(data, [](codec::Reader& r) {
        Challenge c;
        c.server_nonce = r.fixed<kNonceSize>();
        c.proof = r.fixed<32>();
        return c;
    });
}

Bytes Finish::encode() const { return codec::Writer().fixed(proof).take(); }

Finish Finish::decode(ByteView data)
{
    return parse(data, [](codec::Reader& r) { return Finish{r.fixed<32>()}; });
}

HandshakeInitiator::HandshakeInitiator(std::string identity, Bytes psk)
    : HandshakeInitiator(std::move(identity), std::move(psk), random_nonce())
{
}

HandshakeInitiator::HandshakeInitiator(std::string identity, Bytes psk, const Nonce& client_nonce)
    : identity_(std::move(identity)), psk_(std::move(psk)), cn_(client_nonce)
{
}

Hello HandshakeInitiator::hello() const { return Hello{identity_, cn_}; }

Finish HandshakeInitiator::on_challenge(const Challenge& c)
{
    sn_ = c.server_nonce;
    auto expected = server_proof(psk_, cn_, sn_);
    server_ok_ = constant_time_equal(ByteView(expected.data(), expected.size()),
                                     ByteView(c.proof.data(), c.proof.size()));
    challenged_ = true;
    return Finish{client_proof(psk_, cn_, sn_)};
}

PskSession HandshakeInitiator::complete() const
{
    if (!challenged_)
        throw HandshakeError(HandshakeErrc::Protocol);
    if (!server_ok_)
        throw HandshakeError(HandshakeErrc::BadProof);
    return PskSession{identity_, session_key(psk_, cn_, sn_), cn_, sn_, true};
}

HandshakeResponder::HandshakeResponder(const Hello& hello, Bytes psk, Clock::time_point now)
    : HandshakeResponder(hello, std::move(psk), now, random_nonce())
{
}

HandshakeResponder::HandshakeResponder(const Hello& hello, Bytes psk, Clock::time_point now,
                                       const Nonce& server_nonce)
    : identity_(hello.identity), psk_(std::move(psk)), cn_(hello.client_nonce), started_(now)
{
    challenge_.server_nonce = server_nonce;
    challenge_.proof = server_proof(psk_, cn_, server_nonce);
}

PskSession HandshakeResponder::on_finish(const Finish& f, Clock::time_point now) const
{
    if (expired(now))
        throw HandshakeError(HandshakeErrc::Timeout);
    const auto& sn = challenge_.server_nonce;
    auto expected = client_proof(psk_, cn_, sn);
    if (!constant_time_equal(ByteView(expected.data(), expected.size()), ByteView(f.proof.data(), f.proof.size())))
        throw HandshakeError(HandshakeErrc::BadProof);
    return PskSession{identity_, session_key(psk_, cn_, sn), cn_, sn, true};
}

Bytes seal(ByteView msg, const PskSession& session)
{
    if (!session.established)
        throw std::logic_error("seal: session not established");
    auto tag = crypto::hmac_sha256(ByteView(session.session_key.data(), session.session_key.size()), msg);
    Bytes out(msg.begin(), msg.end());
    out.insert(out.end(), tag.begin(), tag.begin() + kTagSize);
    return out;
}

Bytes open(ByteView sealed, const PskSession& session)
{
    if (!session.established)
        throw std::logic_error("open: session not established");
    if (sealed.size() < kTagSize)
        throw WireError(WireErrc::BadTag);
    auto body = sealed.first(sealed.size() - kTagSize);
    auto tag = crypto::hmac_sha256(ByteView(session.session_key.data(), session.session_key.size()), body);
    if (!constant_time_equal(ByteView(tag.data(), kTagSize), sealed.last(kTagSize)))
        throw WireError(WireErrc::BadTag);
    return Bytes(body.begin(), body.end());
}

} // namespace lm2m::wire
