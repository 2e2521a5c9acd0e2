#include "support/stack.hpp"

#include "lm2m/util/crypto.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include <httplib.h>
#include <unistd.h>

using namespace lm2m;
using namespace std::chrono_literals;
using contracts::Role;
using lm2m::testing::Http;
using lm2m::testing::HttpResult;
using lm2m::testing::Stack;
using nlohmann::json;

namespace {

class Mgmt : public ::testing::Test {
protected:
    Http mgmt() const { return stack.mgmt(); }

    /// Polls until the transaction leaves Pending.
    HttpResult settle(const std::string& tx_id, const std::string& token)
    {
        HttpResult r;
        lm2m::testing::wait_until(
            [&] {
                r = mgmt().get("/mgmt/tx/" + tx_id, token);
                return r.status != 202;
            },
            30s);
        return r;
    }

    /// Submits and waits for the outcome.
    HttpResult run(const std::string& method, const std::string& path, const json& body,
                   const std::string& token)
    {
        auto r = mgmt().request(method, path, body.is_null() ? "" : body.dump(), token);
        if (r.status != 202)
            return r;
        return settle(r.json()["tx_id"].get<std::string>(), token);
    }

    json device(const std::string& ep) const
    {
        return json{{"endpoint", ep},
                    {"bootstrap_uri", stack.bootstrap_uri()},
                    {"server_uri", stack.server_uri()},
                    {"bootstrap_psk_identity", ep + "-bs"},
                    {"bootstrap_psk_secret", to_hex(Bytes(16, 0x11))},
                    {"server_psk_identity", ep + "-dm"},
                    {"server_psk_secret", to_hex(Bytes(32, 0x22))}};
    }

    Stack stack;
    std::string admin = stack.token(Role::Admin, "root");
    std::string user = stack.token(Role::User, "joe");
    std::string app = stack.token(Role::Application, "app");
};

TEST_F(Mgmt, RoleMatrix)
{
    struct Case {
        std::string method, path;
        int admin, app, user;
    };
    // Only the gate is checked: bodies are empty so permitted calls answer 400.
    std::vector<Case> cases = {
        {"POST", "/mgmt/devices", 400, 403, 403},        {"GET", "/mgmt/devices", 200, 403, 403},
        {"POST", "/mgmt/users", 400, 403, 403},          {"GET", "/mgmt/users", 200, 403, 403},
        {"PUT", "/mgmt/users/x", 400, 403, 403},         {"POST", "/mgmt/anomalies", 400, 400, 403},
        {"GET", "/mgmt/anomalies", 200, 200, 200},
    };
    for (const auto& c : cases) {
        EXPECT_EQ(mgmt().request(c.method, c.path, "", admin).status, c.admin) << c.method << " " << c.path;
        EXPECT_EQ(mgmt().request(c.method, c.path, "", app).status, c.app) << c.method << " " << c.path;
        EXPECT_EQ(mgmt().request(c.method, c.path, "", user).status, c.user) << c.method << " " << c.path;
        EXPECT_EQ(mgmt().request(c.method, c.path, "", "").status, 401) << c.method << " " << c.path;
    }
    EXPECT_EQ(mgmt().del("/mgmt/devices/x", user).status, 403);
    EXPECT_EQ(mgmt().del("/mgmt/devices/x", app).status, 403);
    EXPECT_EQ(mgmt().del("/mgmt/devices/x", "").status, 401);
}

TEST_F(Mgmt, DeviceLifecycle)
{
    auto add = mgmt().post("/mgmt/devices", device("dev-1").dump(), admin);
    ASSERT_EQ(add.status, 202);
    auto tx_id = add.json()["tx_id"].get<std::string>();
    EXPECT_EQ(tx_id.size(), 64u);
    EXPECT_EQ(add.json()["status"], "Pending");

    auto done = settle(tx_id, user); // any role may poll
    ASSERT_EQ(done.status, 200);
    EXPECT_EQ(done.json()["status"], "Applied");
    EXPECT_GT(done.json()["gas_used"].get<std::uint64_t>(), 21000u);
    EXPECT_TRUE(done.json()["block_height"].is_number_unsigned());

    auto dup = run("POST", "/mgmt/devices", device("dev-1"), admin);
    EXPECT_EQ(dup.status, 409);
    EXPECT_EQ(dup.json()["status"], "Reverted");
    EXPECT_EQ(dup.json()["revert_reason"], "client exists");

    auto list = mgmt().get("/mgmt/devices", admin);
    ASSERT_EQ(list.status, 200);
    ASSERT_EQ(list.json().size(), 1u);
    EXPECT_EQ(list.json()[0]["endpoint"], "dev-1");
    EXPECT_FALSE(list.json()[0].contains("bootstrap_psk_secret"));
    EXPECT_FALSE(list.json()[0].contains("server_psk_secret"));
    EXPECT_EQ(list.body.find(to_hex(Bytes(16, 0x11))), std::string::npos);

    EXPECT_EQ(run("DELETE", "/mgmt/devices/dev-1", nullptr, admin).status, 200);
    EXPECT_TRUE(mgmt().get("/mgmt/devices", admin).json().empty());
    auto gone = run("DELETE", "/mgmt/devices/dev-1", nullptr, admin);
    EXPECT_EQ(gone.status, 409);
    EXPECT_EQ(gone.json()["revert_reason"], "client not found");
}

TEST_F(Mgmt, DeviceValidationHappensBeforeSubmission)
{
    auto pending_before = stack.ledger().next_nonce("mgmt");
    auto bad = device("dev-1");
    bad["bootstrap_psk_secret"] = "abcd";
    EXPECT_EQ(mgmt().post("/mgmt/devices", bad.dump(), admin).status, 400);
    bad = device("dev-1");
    bad["server_psk_secret"] = "not hex";
    EXPECT_EQ(mgmt().post("/mgmt/devices", bad.dump(), admin).status, 400);
    bad = device("dev-1");
    bad.erase("server_uri");
    EXPECT_EQ(mgmt().post("/mgmt/devices", bad.dump(), admin).status, 400);
    bad = device("dev-1");
    bad["server_uri"] = "coap://host";
    EXPECT_EQ(mgmt().post("/mgmt/devices", bad.dump(), admin).status, 400);
    EXPECT_EQ(mgmt().post("/mgmt/devices", "[]", admin).status, 400);
    EXPECT_EQ(stack.ledger().next_nonce("mgmt"), pending_before);
}

TEST_F(Mgmt, Users)
{
    json ana{{"username", "ana"}, {"email", "ana@x.org"}, {"password", "pw1"}, {"role", "Application"}};
    EXPECT_EQ(run("POST", "/mgmt/users", ana, admin).status, 200);
    auto dup = run("POST", "/mgmt/users", ana, admin);
    EXPECT_EQ(dup.status, 409);
    EXPECT_EQ(dup.json()["revert_reason"], "user exists");

    auto list = mgmt().get("/mgmt/users", admin).json();
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0], (json{{"username", "ana"}, {"email", "ana@x.org"}, {"role", "Application"}}));

    auto login = mgmt().post("/mgmt/login", R"({"login":"ana","password":"pw1"})");
    ASSERT_EQ(login.status, 200);
    EXPECT_EQ(login.json()["role"], "Application");

    EXPECT_EQ(run("PUT", "/mgmt/users/ana", json{{"role", "Admin"}, {"password", "pw2"}}, admin).status, 200);
    EXPECT_EQ(mgmt().post("/mgmt/login", R"({"login":"ana","password":"pw1"})").status, 401);
    auto relogin = mgmt().post("/mgmt/login", R"({"login":"ana@x.org","password":"pw2"})");
    ASSERT_EQ(relogin.status, 200);
    EXPECT_EQ(relogin.json()["role"], "Admin");

    EXPECT_EQ(run("PUT", "/mgmt/users/ghost", json{{"email", "g@x.org"}}, admin).status, 409);
    EXPECT_EQ(mgmt().put("/mgmt/users/ana", R"({"role":"Root"})", admin).status, 400);
    EXPECT_EQ(mgmt().put("/mgmt/users/ana", R"({"password":""})", admin).status, 400);
    EXPECT_EQ(mgmt().post("/mgmt/users", R"({"username":"x","email":"x@x","password":"p","role":"Boss"})", admin)
                  .status,
              400);
}

TEST_F(Mgmt, Anomalies)
{
    EXPECT_EQ(run("POST", "/mgmt/anomalies", json{{"payload", "temp 40"}, {"endpoint", "sim-1"}, {"timestamp_ms", 5}},
                  app)
                  .status,
              200);
    EXPECT_EQ(run("POST", "/mgmt/anomalies", json{{"payload", "temp 41"}}, admin).status, 200);
    auto list = mgmt().get("/mgmt/anomalies", user).json();
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0]["timestamp_ms"], 5);
    EXPECT_EQ(list[0]["endpoint"], "sim-1");
    EXPECT_GT(list[1]["timestamp_ms"].get<std::uint64_t>(), 1'600'000'000'000u); // server clock

    EXPECT_EQ(mgmt().post("/mgmt/anomalies", R"({"payload":""})", app).status, 400);
    EXPECT_EQ(mgmt().post("/mgmt/anomalies", R"({"payload":"x","timestamp_ms":0})", app).status, 400);
    EXPECT_EQ(mgmt().post("/mgmt/anomalies", R"({"payload":"x","timestamp_ms":-3})", app).status, 400);
    auto big = run("POST", "/mgmt/anomalies", json{{"payload", std::string(5000, 'x')}}, app);
    EXPECT_EQ(big.status, 409);
    EXPECT_EQ(big.json()["revert_reason"].get<std::string>().rfind("invalid anomaly", 0), 0u);
}

TEST_F(Mgmt, TransactionLookup)
{
    EXPECT_EQ(mgmt().get("/mgmt/tx/" + std::string(64, 'a'), user).status, 404);
    EXPECT_EQ(mgmt().get("/mgmt/tx/abcdef", user).status, 400);
    EXPECT_EQ(mgmt().get("/mgmt/tx/" + std::string(64, 'a'), "").status, 401);
}

TEST(MgmtStandalone, PendingUntilMined)
{
    auto cfg = lm2m::testing::fast_chain();
    auto ledger = contracts::open_ledger(ledger::Ledger::Options{cfg, std::nullopt, false, {}});
    contracts::Submitter submitter(*ledger, "mgmt");
    auth::TokenService tokens(crypto::random_bytes(32));
    auth::AuthService auth(*ledger, tokens, 0ms);
    mgmt::MgmtService svc(*ledger, submitter, auth, {"127.0.0.1", 0, ""}, [] { return std::uint64_t{42}; });
    svc.start();
    Http http(svc.port());
    auto token = tokens.issue("a", Role::Admin);

    auto r = http.post("/mgmt/anomalies", R"({"payload":"p"})", token);
    ASSERT_EQ(r.status, 202);
    auto id = r.json()["tx_id"].get<std::string>();
    EXPECT_EQ(http.get("/mgmt/tx/" + id, token).status, 202);
    ledger->mine_block();
    EXPECT_EQ(http.get("/mgmt/tx/" + id, token).status, 200);
    EXPECT_EQ(http.get("/mgmt/anomalies", token).json()[0]["timestamp_ms"], 42);

    // CORS disabled: no header.
    httplib::Client c("127.0.0.1", svc.port());
    auto g = c.Get("/mgmt/anomalies", {{"Authorization", "Bearer " + token}});
    ASSERT_TRUE(g);
    EXPECT_FALSE(g->has_header("Access-Control-Allow-Origin"));
}

TEST(MgmtStandalone, FollowerRefusesWrites)
{
    auto dir = std::filesystem::temp_directory_path() / ("lm2m-mgmt-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto journal = dir / "chain.journal";
    auto cfg = lm2m::testing::fast_chain();
    auto writer = contracts::open_ledger(ledger::Ledger::Options{cfg, journal, false, {}});
    auto follower = contracts::open_ledger(ledger::Ledger::Options{cfg, journal, true, {}});
    contracts::Submitter submitter(*follower, "mgmt");
    auth::TokenService tokens(crypto::random_bytes(32));
    auth::AuthService auth(*follower, tokens, 0ms);
    mgmt::MgmtService svc(*follower, submitter, auth, {"127.0.0.1", 0, "*"});
    svc.start();
    Http http(svc.port());
    EXPECT_EQ(http.post("/mgmt/anomalies", R"({"payload":"p"})", tokens.issue("a", Role::Admin)).status, 503);
    svc.stop();
    follower.reset();
    writer.reset();
    std::filesystem::remove_all(dir);
}

} // namespace
