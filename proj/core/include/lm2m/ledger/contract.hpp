#pragma once

#include "lm2m/ledger/state.hpp"
#include "lm2m/ledger/types.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lm2m::ledger {

enum class ContractErrc {
    Revert,          ///< precondition failed inside a transaction
    NotFound,        ///< read-only lookup found nothing
    BadArguments,    ///< argument bytes do not decode
    UnknownFunction,
    NotView,         ///< state-changing function invoked through call()
};

std::string_view to_string(ContractErrc c);

class ContractError : public std::runtime_error {
public:
    ContractError(ContractErrc code, const std::string& reason) : std::runtime_error(reason), code_(code) {}
    ContractErrc code() const { return code_; }

private:
    ContractErrc code_;
};

/// Thrown by the gas meter; never escapes the ledger.
struct OutOfGas {};

class GasMeter {
public:
    GasMeter(const ChainConfig& config, std::uint64_t limit) : config_(&config), limit_(limit) {}
    /// Unmetered; used for read-only calls.
    GasMeter() = default;

    void charge(std::uint64_t amount);
    void charge_read(std::size_t bytes) { charge(metered() ? config_->gas_per_read_byte * bytes : 0); }
    void charge_store(std::size_t bytes) { charge(metered() ? config_->gas_per_stored_byte * bytes : 0); }

    std::uint64_t used() const { return used_; }
    bool metered() const { return config_ != nullptr; }

private:
    const ChainConfig* config_ = nullptr;
    std::uint64_t limit_ = 0;
    std::uint64_t used_ = 0;
};

/// Key-value storage handed to contract code, scoped to one contract.
class Storage {
public:
    Storage(std::string_view contract, Overlay& layer, GasMeter& gas);
    /// Read-only view over confirmed state.
    Storage(std::string_view contract, const StateMap& confirmed);

    std::optional<Bytes> get(std::string_view key);
    bool contains(std::string_view key) { return get(key).has_value(); }
    void put(std::string_view key, ByteView value);
    void erase(std::string_view key);
    /// Visits keys with `prefix` in ascending order; keys passed to `fn`
    /// have the contract namespace stripped.
    void scan(std::string_view prefix, const ScanFn& fn);

    bool read_only() const { return layer_ == nullptr; }

private:
    std::string full_key(std::string_view key) const;

    std::string ns_;
    Overlay* layer_ = nullptr;
    const StateMap* confirmed_ = nullptr;
    GasMeter* gas_ = nullptr;
};

class Contract {
public:
    virtual ~Contract() = default;

    virtual std::string_view name() const = 0;
    virtual bool has_function(std::string_view function) const = 0;
    /// View functions may run through call(); all functions may run in transactions.
    virtual bool is_view(std::string_view function) const = 0;
    /// Throws ContractError. Effects made before a throw are discarded by the caller.
    virtual Bytes invoke(std::string_view function, ByteView args, Storage& storage) const = 0;
};

using ContractSet = std::vector<std::shared_ptr<const Contract>>;

} // namespace lm2m::ledger
