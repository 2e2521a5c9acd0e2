#pragma once

#include "lm2m/contracts/api.hpp"

#include <shared_mutex>

namespace lm2m::contracts {

/// Client credential lookups used by the LwM2M servers.
class ClientDirectory {
public:
    virtual ~ClientDirectory() = default;

    virtual std::optional<ClientRecord> get(std::string_view endpoint) const = 0;
    /// First record, in insertion order, whose bootstrap identity matches.
    virtual std::optional<ClientRecord> find_by_bootstrap_identity(std::string_view identity) const = 0;
    /// First record, in insertion order, whose server identity matches.
    virtual std::optional<ClientRecord> find_by_server_identity(std::string_view identity) const = 0;
};

/// Queries the ClientStore contract on every lookup; nothing is cached.
class LedgerClientDirectory final : public ClientDirectory {
public:
    explicit LedgerClientDirectory(const ledger::Ledger& ledger) : queries_(ledger) {}

    std::optional<ClientRecord> get(std::string_view endpoint) const override;
    std::optional<ClientRecord> find_by_bootstrap_identity(std::string_view identity) const override;
    std::optional<ClientRecord> find_by_server_identity(std::string_view identity) const override;

private:
    Queries queries_;
};

/// Plain in-memory map, the baseline for latency comparisons.
class MemoryClientDirectory final : public ClientDirectory {
public:
    /// Returns false when the endpoint is already present.
    bool add(ClientRecord record);
    bool remove(std::string_view endpoint);

    std::optional<ClientRecord> get(std::string_view endpoint) const override;
    std::optional<ClientRecord> find_by_bootstrap_identity(std::string_view identity) const override;
    std::optional<ClientRecord> find_by_server_identity(std::string_view identity) const override;

private:
    mutable std::shared_mutex mutex_;
    std::vector<ClientRecord> records_; // insertion order
};

} // namespace lm2m::contracts
