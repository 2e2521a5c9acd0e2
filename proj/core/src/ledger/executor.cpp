#include "lm2m/ledger/executor.hpp"

#include "lm2m/ledger/ledger.hpp"

namespace lm2m::ledger {

Executor::Executor(const ChainConfig& config, ContractSet contracts)
    : config_(config), contracts_(std::move(contracts))
{
}

const Contract* Executor::find(std::string_view name) const
{
    for (const auto& c : contracts_) {
        if (c->name() == name) return c.get();
    }
    return nullptr;
}

Receipt Executor::execute(const Transaction& tx, Overlay& block_layer, std::uint64_t height) const
{
    Receipt receipt;
    receipt.tx_id = tx.tx_id;
    receipt.block_height = height;

    GasMeter gas(config_, tx.gas_limit);
    try {
        gas.charge(config_.gas_base);
        const auto* contract = find(tx.contract);
        if (contract == nullptr) {
            receipt.status = TxStatus::Reverted;
            receipt.revert_reason = "unknown contract";
        } else {
            auto tx_layer = Overlay::over(block_layer);
            Storage storage(contract->name(), tx_layer, gas);
            contract->invoke(tx.function, tx.args, storage);
            std::move(tx_layer).merge_into(block_layer);
        }
    } catch (const OutOfGas&) {
        receipt.status = TxStatus::OutOfGas;
        receipt.revert_reason = "out of gas";
    } catch (const ContractError& e) {
        receipt.status = TxStatus::Reverted;
        receipt.revert_reason = e.what();
    }
    receipt.gas_used = gas.used();
    return receipt;
}

Bytes Executor::call(const StateMap& confirmed, std::string_view contract, std::string_view function,
                     ByteView args) const
{
    const auto* c = find(contract);
    if (c == nullptr) throw LedgerError(LedgerErrc::UnknownContract, "unknown contract '" + std::string(contract) + "'");
    if (!c->has_function(function)) {
        throw ContractError(ContractErrc::UnknownFunction, "unknown function '" + std::string(function) + "'");
    }
    if (!c->is_view(function)) {
        throw ContractError(ContractErrc::NotView, "'" + std::string(function) + "' is a transaction, not a view");
    }
    Storage storage(c->name(), confirmed);
    return c->invoke(function, args, storage);
}

} // namespace lm2m::ledger
