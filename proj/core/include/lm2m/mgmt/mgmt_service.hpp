#pragma once

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/http/server.hpp"

namespace lm2m::mgmt {

/// Management back end. Every mutation is one ledger transaction answered
/// with 202 {"tx_id"}; the outcome is polled at /mgmt/tx/{tx_id}.
///
///   POST   /mgmt/login                      public
///   POST   /mgmt/devices                    Admin
///   GET    /mgmt/devices                    Admin (secrets omitted)
///   DELETE /mgmt/devices/{endpoint}         Admin
///   POST   /mgmt/users                      Admin
///   GET    /mgmt/users                      Admin
///   PUT    /mgmt/users/{username}           Admin
///   POST   /mgmt/anomalies                  Admin, Application
///   GET    /mgmt/anomalies                  any role
///   GET    /mgmt/tx/{tx_id}                 any role
///
/// Transaction status: 200 Applied, 202 Pending, 409 Reverted or OutOfGas, 404 unknown.
class MgmtService {
public:
    using Clock = std::function<std::uint64_t()>; // ms, anomaly default timestamp

    MgmtService(ledger::Ledger& ledger, contracts::Submitter& submitter, const auth::AuthService& auth,
                http::HttpOptions options, Clock clock = {});
    ~MgmtService();

    void start();
    void stop();
    std::uint16_t port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lm2m::mgmt
