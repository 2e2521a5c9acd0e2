#include "lm2m/contracts/directory.hpp"

#include <algorithm>
#include <mutex>

namespace lm2m::contracts {

namespace {

template <typename Range, typename Pred>
std::optional<ClientRecord> first_match(const Range& records, Pred pred)
{
    for (const auto& r : records)
        if (pred(r))
            return r;
    return std::nullopt;
}

} // namespace

std::optional<ClientRecord> LedgerClientDirectory::get(std::string_view endpoint) const
{
    return queries_.get_client(endpoint);
}

std::optional<ClientRecord> LedgerClientDirectory::find_by_bootstrap_identity(std::string_view identity) const
{
    for (auto& [ep, rec] : queries_.all_clients())
        if (rec.bootstrap_psk_identity == identity)
            return std::move(rec);
    return std::nullopt;
}

std::optional<ClientRecord> LedgerClientDirectory::find_by_server_identity(std::string_view identity) const
{
    for (auto& [ep, rec] : queries_.all_clients())
        if (rec.server_psk_identity == identity)
            return std::move(rec);
    return std::nullopt;
}

bool MemoryClientDirectory::add(ClientRecord record)
{
    std::unique_lock lk(mutex_);
    if (std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.endpoint == record.endpoint; }))
        return false;
    records_.push_back(std::move(record));
    return true;
}

bool MemoryClientDirectory::remove(std::string_view endpoint)
{
    std::unique_lock lk(mutex_);
    return std::erase_if(records_, [&](const auto& r) { return r.endpoint == endpoint; }) > 0;
}

std::optional<ClientRecord> MemoryClientDirectory::get(std::string_view endpoint) const
{
    std::shared_lock lk(mutex_);
    return first_match(records_, [&](const auto& r) { return r.endpoint == endpoint; });
}

std::optional<ClientRecord> MemoryClientDirectory::find_by_bootstrap_identity(std::string_view identity) const
{
    std::shared_lock lk(mutex_);
    return first_match(records_, [&](const auto& r) { return r.bootstrap_psk_identity == identity; });
}

std::optional<ClientRecord> MemoryClientDirectory::find_by_server_identity(std::string_view identity) const
{
    std::shared_lock lk(mutex_);
    return first_match(records_, [&](const auto& r) { return r.server_psk_identity == identity; });
}

} // namespace lm2m::contracts
