#include "lm2m/contracts/api.hpp"

#include "lm2m/contracts/stores.hpp"

namespace lm2m::contracts {

using ledger::ContractErrc;
using ledger::ContractError;

namespace tx {

namespace {

ledger::Transaction make(std::string_view contract, std::string_view function, Bytes args)
{
    ledger::Transaction t;
    t.contract = std::string(contract);
    t.function = std::string(function);
    t.args = std::move(args);
    return t;
}

} // namespace

ledger::Transaction add_client(const ClientRecord& record)
{
    codec::Writer w;
    w.str(record.endpoint);
    record.encode(w);
    return make(kClientStore, "addClient", w.take());
}

ledger::Transaction remove_client(std::string_view endpoint)
{
    codec::Writer w;
    w.str(endpoint);
    return make(kClientStore, "removeClient", w.take());
}

ledger::Transaction add_anomaly(const AnomalyRecord& anomaly)
{
    codec::Writer w;
    anomaly.encode(w);
    return make(kAnomalyStore, "addAnomaly", w.take());
}

ledger::Transaction add_user(const UserRecord& user)
{
    codec::Writer w;
    w.str(user.username);
    user.encode(w);
    return make(kUserStore, "addUser", w.take());
}

ledger::Transaction update_user(const UserRecord& user)
{
    codec::Writer w;
    w.str(user.username);
    user.encode(w);
    return make(kUserStore, "updateUser", w.take());
}

} // namespace tx

ledger::Hash32 Submitter::submit(ledger::Transaction t)
{
    std::lock_guard lock(mutex_);
    t.caller = caller_;
    t.nonce = ledger_->next_nonce(caller_);
    t.seal();
    return ledger_->submit_transaction(std::move(t));
}

namespace {

Bytes str_arg(std::string_view s)
{
    codec::Writer w;
    w.str(s);
    return w.take();
}

bool decode_bool(const Bytes& b)
{
    codec::Reader r(b);
    return r.boolean();
}

} // namespace

std::optional<ClientRecord> Queries::get_client(std::string_view endpoint) const
{
    try {
        const auto out = ledger_->call(kClientStore, "getClient", str_arg(endpoint));
        codec::Reader r(out);
        return ClientRecord::decode(r);
    } catch (const ContractError& e) {
        if (e.code() == ContractErrc::NotFound) return std::nullopt;
        throw;
    }
}

std::vector<std::pair<std::string, ClientRecord>> Queries::all_clients() const
{
    const auto out = ledger_->call(kClientStore, "getAllClients", {});
    codec::Reader r(out);
    const auto n = r.u32();
    std::vector<std::pair<std::string, ClientRecord>> clients;
    clients.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto endpoint = r.str();
        clients.emplace_back(std::move(endpoint), ClientRecord::decode(r));
    }
    return clients;
}

bool Queries::client_exists(std::string_view endpoint) const
{
    return decode_bool(ledger_->call(kClientStore, "clientExists", str_arg(endpoint)));
}

std::vector<AnomalyRecord> Queries::all_anomalies() const
{
    const auto out = ledger_->call(kAnomalyStore, "getAllAnomalies", {});
    codec::Reader r(out);
    const auto n = r.u32();
    std::vector<AnomalyRecord> anomalies;
    anomalies.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) anomalies.push_back(AnomalyRecord::decode(r));
    return anomalies;
}

std::uint64_t Queries::anomaly_count() const
{
    const auto out = ledger_->call(kAnomalyStore, "getNumAnomalies", {});
    codec::Reader r(out);
    return r.u64();
}

std::vector<std::pair<std::string, UserRecord>> Queries::all_users() const
{
    const auto out = ledger_->call(kUserStore, "getAllUsers", {});
    codec::Reader r(out);
    const auto n = r.u32();
    std::vector<std::pair<std::string, UserRecord>> users;
    users.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto username = r.str();
        users.emplace_back(std::move(username), UserRecord::decode(r));
    }
    return users;
}

std::optional<UserRecord> Queries::validate_login(std::string_view wildcard) const
{
    try {
        const auto out = ledger_->call(kUserStore, "validateLogin", str_arg(wildcard));
        codec::Reader r(out);
        return UserRecord::decode(r);
    } catch (const ContractError& e) {
        if (e.code() == ContractErrc::NotFound) return std::nullopt;
        throw;
    }
}

bool Queries::user_exists(std::string_view username) const
{
    return decode_bool(ledger_->call(kUserStore, "userExists", str_arg(username)));
}

std::unique_ptr<ledger::Ledger> open_ledger(ledger::Ledger::Options options)
{
    return std::make_unique<ledger::Ledger>(std::move(options), default_contracts());
}

} // namespace lm2m::contracts
