#include "lm2m/auth/auth_service.hpp"

#include <thread>

namespace lm2m::auth {

using contracts::Role;

AuthService::AuthService(const ledger::Ledger& ledger, const TokenService& tokens, std::chrono::milliseconds floor)
    : queries_(ledger), tokens_(&tokens), floor_(floor)
{
}

LoginResult AuthService::login(std::string_view wildcard, std::string_view password) const
{
    const auto deadline = std::chrono::steady_clock::now() + floor_;
    struct Pad {
        std::chrono::steady_clock::time_point until;
        ~Pad() { std::this_thread::sleep_until(until); }
    } pad{deadline};

    static const Bytes dummy_salt(contracts::kSaltSize, 0);
    auto user = queries_.validate_login(wildcard);
    auto hash = contracts::hash_password(user ? ByteView(user->salt) : ByteView(dummy_salt), password);
    if (!user || !constant_time_equal(hash, user->password_hash))
        throw InvalidCredentials();
    LoginResult out;
    out.token = tokens_->issue(user->username, user->role);
    out.claims = tokens_->verify(out.token);
    return out;
}

AdminSeed AdminSeed::from(const KeyValueConfig& cfg)
{
    AdminSeed s;
    s.username = cfg.get_or("admin_username", "");
    s.email = cfg.get_or("admin_email", "");
    s.password = cfg.get_or("admin_password", "");
    if (s.username.empty() || s.email.empty() || s.password.empty())
        throw std::invalid_argument("seed admin needs admin_username, admin_email and admin_password");
    return s;
}

std::string_view to_string(SeedResult r)
{
    switch (r) {
    case SeedResult::Created: return "created";
    case SeedResult::AlreadySeeded: return "already seeded";
    case SeedResult::Refused: return "refused";
    }
    return "unknown";
}

SeedResult bootstrap_admin(ledger::Ledger& ledger, contracts::Submitter& submitter, const AdminSeed& seed,
                           std::chrono::milliseconds timeout)
{
    contracts::Queries q(ledger);
    auto users = q.all_users();
    if (!users.empty()) {
        if (users.size() == 1 && users[0].first == seed.username && users[0].second.role == Role::Admin)
            return SeedResult::AlreadySeeded;
        return SeedResult::Refused;
    }
    auto id = submitter.submit(contracts::tx::add_user(
        contracts::make_user(seed.username, seed.email, seed.password, Role::Admin)));
    auto receipt = ledger.wait_for_receipt(id, timeout);
    if (!receipt)
        throw std::runtime_error("seed admin transaction not mined in time");
    if (receipt->status != ledger::TxStatus::Applied)
        throw std::runtime_error("seed admin transaction failed: " + receipt->revert_reason.value_or("out of gas"));
    return SeedResult::Created;
}

} // namespace lm2m::auth
