#include "lm2m/contracts/records.hpp"

#include "lm2m/util/crypto.hpp"
#include "lm2m/util/net.hpp"

namespace lm2m::contracts {

void ClientRecord::encode(codec::Writer& w) const
{
    w.str(endpoint)
        .str(bootstrap_uri)
        .str(server_uri)
        .str(bootstrap_psk_identity)
        .bytes(bootstrap_psk_secret)
        .str(server_psk_identity)
        .bytes(server_psk_secret);
}

ClientRecord ClientRecord::decode(codec::Reader& r)
{
    ClientRecord c;
    c.endpoint = r.str();
    c.bootstrap_uri = r.str();
    c.server_uri = r.str();
    c.bootstrap_psk_identity = r.str();
    c.bootstrap_psk_secret = r.bytes();
    c.server_psk_identity = r.str();
    c.server_psk_secret = r.bytes();
    return c;
}

Bytes ClientRecord::serialize() const
{
    codec::Writer w;
    encode(w);
    return w.take();
}

std::optional<std::string> ClientRecord::validation_error() const
{
    if (endpoint.empty()) return "endpoint is empty";
    auto secret_ok = [](const Bytes& s) { return s.size() >= kMinPskSecret && s.size() <= kMaxPskSecret; };
    if (!secret_ok(bootstrap_psk_secret)) return "bootstrap PSK secret must be 16-64 bytes";
    if (!secret_ok(server_psk_secret)) return "server PSK secret must be 16-64 bytes";
    try {
        net::Uri::parse(bootstrap_uri);
    } catch (const std::invalid_argument&) {
        return "bootstrap URI does not parse";
    }
    try {
        net::Uri::parse(server_uri);
    } catch (const std::invalid_argument&) {
        return "server URI does not parse";
    }
    return std::nullopt;
}

void AnomalyRecord::encode(codec::Writer& w) const { w.u64(timestamp_ms).str(endpoint).str(payload); }

AnomalyRecord AnomalyRecord::decode(codec::Reader& r)
{
    AnomalyRecord a;
    a.timestamp_ms = r.u64();
    a.endpoint = r.str();
    a.payload = r.str();
    return a;
}

std::optional<std::string> AnomalyRecord::validation_error() const
{
    if (timestamp_ms == 0) return "timestamp must be positive";
    if (payload.empty()) return "payload is empty";
    if (payload.size() > kMaxAnomalyPayload) return "payload exceeds 4096 bytes";
    return std::nullopt;
}

std::string_view to_string(Role role)
{
    switch (role) {
    case Role::Admin: return "Admin";
    case Role::User: return "User";
    case Role::Application: return "Application";
    }
    return "Unknown";
}

std::optional<Role> parse_role(std::string_view text)
{
    if (text == "Admin") return Role::Admin;
    if (text == "User") return Role::User;
    if (text == "Application") return Role::Application;
    return std::nullopt;
}

void UserRecord::encode(codec::Writer& w) const
{
    w.str(username).str(email).bytes(password_hash).bytes(salt).u8(static_cast<std::uint8_t>(role));
}

UserRecord UserRecord::decode(codec::Reader& r)
{
    UserRecord u;
    u.username = r.str();
    u.email = r.str();
    u.password_hash = r.bytes();
    u.salt = r.bytes();
    const auto role = r.u8();
    if (role > static_cast<std::uint8_t>(Role::Application)) throw codec::DecodeError("invalid role");
    u.role = static_cast<Role>(role);
    return u;
}

std::optional<std::string> UserRecord::validation_error() const
{
    if (username.empty()) return "username is empty";
    if (email.empty()) return "email is empty";
    if (password_hash.size() != kPasswordHashSize) return "password hash must be 32 bytes";
    if (salt.size() != kSaltSize) return "salt must be 16 bytes";
    return std::nullopt;
}

Bytes hash_password(ByteView salt, std::string_view password)
{
    auto d = crypto::Sha256{}.update(salt).update(as_view(password)).finish();
    return Bytes(d.begin(), d.end());
}

UserRecord make_user(std::string username, std::string email, std::string_view password, Role role)
{
    UserRecord u;
    u.username = std::move(username);
    u.email = std::move(email);
    u.salt = crypto::random_bytes(kSaltSize);
    u.password_hash = hash_password(u.salt, password);
    u.role = role;
    return u;
}

} // namespace lm2m::contracts
