#include "lm2m/mgmt/mgmt_service.hpp"

#include "../http/common.hpp"
#include "lm2m/util/crypto.hpp"

namespace lm2m::mgmt {

using contracts::Role;
using http::json;
using http::send_error;
using http::send_json;

namespace {

std::uint64_t system_ms()
{
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

std::optional<std::string> str_field(const json& body, const char* key)
{
    if (!body.contains(key) || !body[key].is_string())
        return std::nullopt;
    return body[key].get<std::string>();
}

json device_json(const contracts::ClientRecord& r)
{
    return json{{"endpoint", r.endpoint},
                {"bootstrap_uri", r.bootstrap_uri},
                {"server_uri", r.server_uri},
                {"bootstrap_psk_identity", r.bootstrap_psk_identity},
                {"server_psk_identity", r.server_psk_identity}};
}

json user_json(const contracts::UserRecord& u)
{
    return json{{"username", u.username}, {"email", u.email}, {"role", std::string(contracts::to_string(u.role))}};
}

std::string_view status_name(ledger::TxStatus s)
{
    switch (s) {
    case ledger::TxStatus::Applied: return "Applied";
    case ledger::TxStatus::Reverted: return "Reverted";
    case ledger::TxStatus::OutOfGas: return "OutOfGas";
    }
    return "Unknown";
}

} // namespace

struct MgmtService::Impl {
    ledger::Ledger& ledger;
    contracts::Submitter& submitter;
    const auth::AuthService& auth;
    Clock clock;
    contracts::Queries queries;
    http::Runner runner;

    Impl(ledger::Ledger& l, contracts::Submitter& s, const auth::AuthService& a, const http::HttpOptions& o, Clock c)
        : ledger(l), submitter(s), auth(a), clock(c ? std::move(c) : Clock(system_ms)), queries(l), runner(o, "mgmt")
    {
        routes();
    }

    std::optional<auth::Claims> gate(const httplib::Request& req, httplib::Response& res,
                                     std::initializer_list<Role> roles)
    {
        return http::authorize(auth.tokens(), req, res, roles);
    }

    void submit(httplib::Response& res, ledger::Transaction tx)
    {
        try {
            auto id = submitter.submit(std::move(tx));
            send_json(res, 202, json{{"tx_id", id.hex()}, {"status", "Pending"}});
        } catch (const ledger::LedgerError& e) {
            send_error(res, e.code() == ledger::LedgerErrc::ReadOnly ? 503 : 500, e.what());
        }
    }

    void routes()
    {
        auto& s = runner.server();

        s.Post("/mgmt/login", [this](const httplib::Request& req, httplib::Response& res) {
            http::handle_login(auth, req, res);
        });

        s.Post("/mgmt/devices", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            auto body = http::parse_body(req, res);
            if (!body)
                return;
            contracts::ClientRecord r;
            try {
                r.endpoint = body->at("endpoint").get<std::string>();
                r.bootstrap_uri = body->at("bootstrap_uri").get<std::string>();
                r.server_uri = body->at("server_uri").get<std::string>();
                r.bootstrap_psk_identity = body->at("bootstrap_psk_identity").get<std::string>();
                r.bootstrap_psk_secret = from_hex(body->at("bootstrap_psk_secret").get<std::string>());
                r.server_psk_identity = body->at("server_psk_identity").get<std::string>();
                r.server_psk_secret = from_hex(body->at("server_psk_secret").get<std::string>());
            } catch (const std::exception&) {
                return send_error(res, 400, "device needs endpoint, URIs, identities and hex secrets");
            }
            if (auto err = r.validation_error())
                return send_error(res, 400, *err);
            submit(res, contracts::tx::add_client(r));
        });

        s.Get("/mgmt/devices", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            json out = json::array();
            for (const auto& [ep, r] : queries.all_clients())
                out.push_back(device_json(r));
            send_json(res, 200, out);
        });

        s.Delete(R"(/mgmt/devices/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            submit(res, contracts::tx::remove_client(req.matches[1].str()));
        });

        s.Post("/mgmt/users", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            auto body = http::parse_body(req, res);
            if (!body)
                return;
            auto username = str_field(*body, "username");
            auto email = str_field(*body, "email");
            auto password = str_field(*body, "password");
            auto role = contracts::parse_role(str_field(*body, "role").value_or(""));
            if (!username || !email || !password || password->empty() || !role)
                return send_error(res, 400, "user needs username, email, password and a valid role");
            auto user = contracts::make_user(*username, *email, *password, *role);
            if (auto err = user.validation_error())
                return send_error(res, 400, *err);
            submit(res, contracts::tx::add_user(user));
        });

        s.Get("/mgmt/users", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            json out = json::array();
            for (const auto& [name, u] : queries.all_users())
                out.push_back(user_json(u));
            send_json(res, 200, out);
        });

        s.Put(R"(/mgmt/users/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin}))
                return;
            auto body = http::parse_body(req, res);
            if (!body)
                return;
            auto username = req.matches[1].str();
            std::optional<Role> role;
            if (auto r = str_field(*body, "role")) {
                role = contracts::parse_role(*r);
                if (!role)
                    return send_error(res, 400, "invalid role");
            }
            // Start from the stored record; an absent user still yields a
            // transaction so that the contract reports the failure.
            contracts::UserRecord user;
            bool found = false;
            for (auto& [name, u] : queries.all_users())
                if (name == username) {
                    user = std::move(u);
                    found = true;
                }
            if (!found)
                user = contracts::make_user(username, "", to_hex(crypto::random_bytes(16)), Role::User);
            if (auto email = str_field(*body, "email"))
                user.email = *email;
            if (auto password = str_field(*body, "password")) {
                if (password->empty())
                    return send_error(res, 400, "empty password");
                user = contracts::make_user(user.username, user.email, *password, user.role);
            }
            if (role)
                user.role = *role;
            submit(res, contracts::tx::update_user(user));
        });

        s.Post("/mgmt/anomalies", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, {Role::Admin, Role::Application}))
                return;
            auto body = http::parse_body(req, res);
            if (!body)
                return;
            contracts::AnomalyRecord a;
            a.payload = str_field(*body, "payload").value_or("");
            if (a.payload.empty())
                return send_error(res, 400, "payload required");
            a.endpoint = str_field(*body, "endpoint").value_or("");
            a.timestamp_ms = clock();
            if (body->contains("timestamp_ms")) {
                const auto& ts = (*body)["timestamp_ms"];
                if (!ts.is_number_unsigned() || ts.get<std::uint64_t>() == 0)
                    return send_error(res, 400, "timestamp_ms must be a positive integer");
                a.timestamp_ms = ts.get<std::uint64_t>();
            }
            submit(res, contracts::tx::add_anomaly(a));
        });

        s.Get("/mgmt/anomalies", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, http::kAllRoles))
                return;
            json out = json::array();
            for (const auto& a : queries.all_anomalies())
                out.push_back(json{{"timestamp_ms", a.timestamp_ms}, {"endpoint", a.endpoint}, {"payload", a.payload}});
            send_json(res, 200, out);
        });

        s.Get(R"(/mgmt/tx/([0-9A-Fa-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res, http::kAllRoles))
                return;
            ledger::Hash32 id;
            try {
                id = ledger::Hash32::from_hex(req.matches[1].str());
            } catch (const std::exception&) {
                return send_error(res, 400, "tx id must be 64 hex characters");
            }
            ledger::TxLookup lookup;
            try {
                lookup = ledger.get_receipt(id);
            } catch (const ledger::LedgerError&) {
                return send_error(res, 404, "unknown transaction");
            }
            if (std::holds_alternative<ledger::PendingTx>(lookup))
                return send_json(res, 202, json{{"tx_id", id.hex()}, {"status", "Pending"}});
            const auto& r = std::get<ledger::Receipt>(lookup);
            json j{{"tx_id", id.hex()},
                   {"status", std::string(status_name(r.status))},
                   {"gas_used", r.gas_used},
                   {"block_height", r.block_height}};
            if (r.revert_reason)
                j["revert_reason"] = *r.revert_reason;
            send_json(res, r.status == ledger::TxStatus::Applied ? 200 : 409, j);
        });
    }
};

MgmtService::MgmtService(ledger::Ledger& ledger, contracts::Submitter& submitter, const auth::AuthService& auth,
                         http::HttpOptions options, Clock clock)
    : impl_(std::make_unique<Impl>(ledger, submitter, auth, options, std::move(clock)))
{
}

MgmtService::~MgmtService() { stop(); }

void MgmtService::start() { impl_->runner.start(); }
void MgmtService::stop() { impl_->runner.stop(); }
std::uint16_t MgmtService::port() const { return impl_->runner.port(); }

} // namespace lm2m::mgmt
