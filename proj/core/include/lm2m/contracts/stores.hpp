#pragma once

#include "lm2m/ledger/contract.hpp"

namespace lm2m::contracts {

/// Function-name dispatch shared by the three stores.
class DispatchContract : public ledger::Contract {
public:
    bool has_function(std::string_view function) const override;
    bool is_view(std::string_view function) const override;
    Bytes invoke(std::string_view function, ByteView args, ledger::Storage& storage) const override;

protected:
    using Handler = Bytes (*)(codec::Reader& args, ledger::Storage& storage);
    struct Function {
        std::string_view name;
        bool view;
        Handler handler;
    };

    explicit DispatchContract(std::vector<Function> functions) : functions_(std::move(functions)) {}

private:
    const Function* lookup(std::string_view name) const;
    std::vector<Function> functions_;
};

/// Endpoint name -> ClientRecord. Transactions: addClient, removeClient.
/// Views: getClient, getAllClients, clientExists.
class ClientStore final : public DispatchContract {
public:
    ClientStore();
    std::string_view name() const override;
};

/// Append-only list of critical-information entries, 1-based.
/// Transactions: addAnomaly. Views: getAllAnomalies, getNumAnomalies, anomalyExists.
class AnomalyStore final : public DispatchContract {
public:
    AnomalyStore();
    std::string_view name() const override;
};

/// Username -> UserRecord with a unique email index.
/// Transactions: addUser, updateUser. Views: getAllUsers, validateLogin, userExists.
class UserStore final : public DispatchContract {
public:
    UserStore();
    std::string_view name() const override;
};

/// The three stores, ready for a ledger.
ledger::ContractSet default_contracts();

} // namespace lm2m::contracts
