#pragma once

#include "lm2m/util/codec.hpp"

#include <optional>
#include <string>

namespace lm2m::contracts {

inline constexpr std::string_view kClientStore = "ClientStore";
inline constexpr std::string_view kAnomalyStore = "AnomalyStore";
inline constexpr std::string_view kUserStore = "UserStore";

inline constexpr std::size_t kMinPskSecret = 16;
inline constexpr std::size_t kMaxPskSecret = 64;
inline constexpr std::size_t kMaxAnomalyPayload = 4096;
inline constexpr std::size_t kPasswordHashSize = 32;
inline constexpr std::size_t kSaltSize = 16;

/// Credentials and server URIs of one LwM2M client.
struct ClientRecord {
    std::string endpoint;
    std::string bootstrap_uri;
    std::string server_uri;
    std::string bootstrap_psk_identity;
    Bytes bootstrap_psk_secret;
    std::string server_psk_identity;
    Bytes server_psk_secret;

    void encode(codec::Writer& w) const;
    static ClientRecord decode(codec::Reader& r);
    Bytes serialize() const;

    /// Empty when the record satisfies every field constraint.
    std::optional<std::string> validation_error() const;

    bool operator==(const ClientRecord&) const = default;
};

struct AnomalyRecord {
    std::uint64_t timestamp_ms = 0;
    std::string endpoint;
    std::string payload;

    void encode(codec::Writer& w) const;
    static AnomalyRecord decode(codec::Reader& r);
    std::optional<std::string> validation_error() const;

    bool operator==(const AnomalyRecord&) const = default;
};

enum class Role : std::uint8_t { Admin = 0, User = 1, Application = 2 };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct UserRecord {
    std::string username;
    std::string email;
    Bytes password_hash; // SHA-256(salt || password)
    Bytes salt;
    Role role = Role::User;

    void encode(codec::Writer& w) const;
    static UserRecord decode(codec::Reader& r);
    std::optional<std::string> validation_error() const;

    bool operator==(const UserRecord&) const = default;
};

/// SHA-256(salt || utf8(password)).
Bytes hash_password(ByteView salt, std::string_view password);

/// Fresh random salt plus hash.
UserRecord make_user(std::string username, std::string email, std::string_view password, Role role);

} // namespace lm2m::contracts
