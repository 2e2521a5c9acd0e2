#pragma once

#include "lm2m/auth/token.hpp"
#include "lm2m/contracts/api.hpp"
#include "lm2m/util/config.hpp"

namespace lm2m::auth {

class InvalidCredentials : public std::runtime_error {
public:
    InvalidCredentials() : std::runtime_error("invalid credentials") {}
};

struct LoginResult {
    std::string token;
    Claims claims;
};

/// Password login against UserStore.
///
/// Every attempt performs one contract lookup and one password hash, then
/// waits until `floor` has elapsed, so an unknown user and a wrong password
/// take the same time from the outside.
class AuthService {
public:
    AuthService(const ledger::Ledger& ledger, const TokenService& tokens,
                std::chrono::milliseconds floor = std::chrono::milliseconds(25));

    /// Throws InvalidCredentials.
    LoginResult login(std::string_view wildcard, std::string_view password) const;

    const TokenService& tokens() const { return *tokens_; }

private:
    contracts::Queries queries_;
    const TokenService* tokens_;
    std::chrono::milliseconds floor_;
};

struct AdminSeed {
    std::string username;
    std::string email;
    std::string password;

    /// Keys admin_username, admin_email, admin_password.
    static AdminSeed from(const KeyValueConfig& cfg);
};

enum class SeedResult { Created, AlreadySeeded, Refused };
std::string_view to_string(SeedResult r);

/// First-run seeding: creates one Admin when UserStore is empty. A store that
/// already holds exactly this admin counts as seeded; any other content is
/// refused. Throws std::runtime_error if the seeding transaction fails.
SeedResult bootstrap_admin(ledger::Ledger& ledger, contracts::Submitter& submitter, const AdminSeed& seed,
                           std::chrono::milliseconds timeout = std::chrono::seconds(120));

} // namespace lm2m::auth
