#pragma once

// Typed helpers over the raw ledger interface: transaction builders for the
// state-changing functions and a query facade for the views.

#include "lm2m/contracts/records.hpp"
#include "lm2m/ledger/ledger.hpp"

#include <memory>
#include <mutex>

namespace lm2m::contracts {

namespace tx {

/// Unsealed transactions; caller and nonce are filled by a Submitter.
ledger::Transaction add_client(const ClientRecord& record);
ledger::Transaction remove_client(std::string_view endpoint);
ledger::Transaction add_anomaly(const AnomalyRecord& anomaly);
ledger::Transaction add_user(const UserRecord& user);
ledger::Transaction update_user(const UserRecord& user);

} // namespace tx

/// Allocates per-caller nonces under a lock, then seals and submits.
class Submitter {
public:
    Submitter(ledger::Ledger& ledger, std::string caller) : ledger_(&ledger), caller_(std::move(caller)) {}

    ledger::Hash32 submit(ledger::Transaction tx);
    const std::string& caller() const { return caller_; }

private:
    ledger::Ledger* ledger_;
    std::string caller_;
    std::mutex mutex_;
};

/// Read-only contract calls. Lookups that miss return nullopt.
class Queries {
public:
    explicit Queries(const ledger::Ledger& ledger) : ledger_(&ledger) {}

    std::optional<ClientRecord> get_client(std::string_view endpoint) const;
    std::vector<std::pair<std::string, ClientRecord>> all_clients() const;
    bool client_exists(std::string_view endpoint) const;

    std::vector<AnomalyRecord> all_anomalies() const;
    std::uint64_t anomaly_count() const;

    std::vector<std::pair<std::string, UserRecord>> all_users() const;
    std::optional<UserRecord> validate_login(std::string_view wildcard) const;
    bool user_exists(std::string_view username) const;

private:
    const ledger::Ledger* ledger_;
};

/// Ledger preloaded with ClientStore, AnomalyStore and UserStore.
std::unique_ptr<ledger::Ledger> open_ledger(ledger::Ledger::Options options);

} // namespace lm2m::contracts
