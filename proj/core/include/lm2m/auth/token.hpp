#pragma once

// HS256 JSON Web Tokens.

#include "lm2m/contracts/records.hpp"

#include <chrono>
#include <filesystem>
#include <functional>

namespace lm2m::auth {

inline constexpr std::size_t kSecretSize = 32;
inline constexpr std::chrono::seconds kDefaultTokenTtl{3600};

enum class TokenErrc { BadSignature, Expired, Malformed, SecretMissing };
std::string_view to_string(TokenErrc c);

class TokenError : public std::runtime_error {
public:
    explicit TokenError(TokenErrc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}
    TokenErrc code() const { return code_; }

private:
    TokenErrc code_;
};

struct Claims {
    std::string sub;
    contracts::Role role = contracts::Role::User;
    std::int64_t iat = 0;
    std::int64_t exp = 0;
};

class TokenService {
public:
    using Clock = std::function<std::int64_t()>; // unix seconds

    /// Throws TokenError{SecretMissing} for an empty secret.
    explicit TokenService(Bytes secret, std::chrono::seconds ttl = kDefaultTokenTtl, Clock now = {});

    std::string issue(const std::string& sub, contracts::Role role) const;
    /// Signs arbitrary claims as given.
    std::string sign(const Claims& claims) const;
    /// Throws TokenError{BadSignature | Expired | Malformed}.
    Claims verify(std::string_view token) const;

    std::chrono::seconds ttl() const { return ttl_; }

private:
    Bytes secret_;
    std::chrono::seconds ttl_;
    Clock now_;
};

/// Reads a 32-byte secret. Throws TokenError{SecretMissing}.
Bytes load_secret(const std::filesystem::path& path);
/// Reads the secret, creating it with fresh random bytes (mode 0600) when absent.
Bytes load_or_create_secret(const std::filesystem::path& path);

} // namespace lm2m::auth
