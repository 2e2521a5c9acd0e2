#pragma once

#include "lm2m/ledger/contract.hpp"

namespace lm2m::ledger {

/// Runs transactions against contract code with gas metering and atomic revert.
class Executor {
public:
    Executor(const ChainConfig& config, ContractSet contracts);

    /// Applies `tx` to `block_layer` only when it completes; a revert or
    /// out-of-gas leaves `block_layer` untouched.
    Receipt execute(const Transaction& tx, Overlay& block_layer, std::uint64_t height) const;

    /// Read-only invocation against confirmed state. Throws ContractError.
    Bytes call(const StateMap& confirmed, std::string_view contract, std::string_view function, ByteView args) const;

    const Contract* find(std::string_view name) const;
    const ContractSet& contracts() const { return contracts_; }
    const ChainConfig& config() const { return config_; }

private:
    ChainConfig config_;
    ContractSet contracts_;
};

} // namespace lm2m::ledger
