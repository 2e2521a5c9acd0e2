#include "support/contract_oracle.hpp"
#include "support/stack.hpp"

#include "lm2m/bench/scenarios.hpp"
#include "lm2m/contracts/stores.hpp"
#include "lm2m/ledger/journal.hpp"
#include "lm2m/sim/client_flow.hpp"
#include "lm2m/wire/errors.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <random>

#include <unistd.h>

using namespace lm2m;
using namespace std::chrono_literals;
using contracts::Role;
using lm2m::testing::Http;
using lm2m::testing::HttpResult;
using lm2m::testing::Stack;
using lm2m::testing::StackOptions;
using nlohmann::json;
using SteadyClock = std::chrono::steady_clock;

namespace {

double ms_between(SteadyClock::time_point a, SteadyClock::time_point b)
{
    return std::chrono::duration<double, std::milli>(b - a).count();
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("lm2m-accept-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Polls /mgmt/tx until the transaction leaves Pending.
HttpResult settle(const Http& mgmt, const std::string& tx_id, const std::string& token)
{
    HttpResult r;
    lm2m::testing::wait_until(
        [&] {
            r = mgmt.get("/mgmt/tx/" + tx_id, token);
            return r.status != 202;
        },
        60s, 25ms);
    return r;
}

/// Reads a text/event-stream, timestamping each "data:" event, until the
/// server ends the stream or `deadline` passes.
struct SseReader {
    std::vector<SteadyClock::time_point> events;
    std::mutex mu;
    std::atomic<bool> abort{false};

    int run(std::uint16_t port, const std::string& path, const std::string& token)
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(30, 0);
        std::string buffer;
        auto r = c.Get(path, {{"Authorization", "Bearer " + token}}, [&](const char* data, std::size_t n) {
            buffer.append(data, n);
            std::size_t pos;
            while ((pos = buffer.find("\n\n")) != std::string::npos) {
                if (buffer.rfind("data: ", 0) == 0) {
                    std::lock_guard lk(mu);
                    events.push_back(SteadyClock::now());
                }
                buffer.erase(0, pos + 2);
            }
            return !abort.load();
        });
        return r ? r->status : -1;
    }

    std::size_t count()
    {
        std::lock_guard lk(mu);
        return events.size();
    }
};

// ---------------------------------------------------------------------------

TEST(Acceptance, end_to_end_provisioning)
{
    StackOptions opts;
    opts.chain = ledger::ChainConfig::desk();
    ASSERT_EQ(opts.chain.block_interval_ms, 500u);
    Stack stack(opts);
    auto mgmt = stack.mgmt();
    auto api = stack.api();

    const auto t0 = SteadyClock::now();

    // Seed admin, then log in through the management interface.
    ASSERT_EQ(auth::bootstrap_admin(stack.ledger(), stack.submitter(), {"admin", "admin@example.org", "admin-pw"}),
              auth::SeedResult::Created);
    auto login = mgmt.post("/mgmt/login", R"({"login":"admin","password":"admin-pw"})");
    ASSERT_EQ(login.status, 200);
    auto token = login.json()["token"].get<std::string>();

    // Admin adds the client record and waits for the receipt.
    auto rec = stack.make_record("e2e-dev", 0x31);
    json device{{"endpoint", rec.endpoint},
                {"bootstrap_uri", rec.bootstrap_uri},
                {"server_uri", rec.server_uri},
                {"bootstrap_psk_identity", rec.bootstrap_psk_identity},
                {"bootstrap_psk_secret", to_hex(rec.bootstrap_psk_secret)},
                {"server_psk_identity", rec.server_psk_identity},
                {"server_psk_secret", to_hex(rec.server_psk_secret)}};
    auto add = mgmt.post("/mgmt/devices", device.dump(), token);
    ASSERT_EQ(add.status, 202);
    auto receipt = settle(mgmt, add.json()["tx_id"].get<std::string>(), token);
    ASSERT_EQ(receipt.status, 200);
    ASSERT_EQ(receipt.json()["status"], "Applied");

    // The simulated device bootstraps and registers on its own.
    sim::SimDevice dev(stack.sim_config(rec));
    dev.start();
    ASSERT_TRUE(dev.wait_registered(10s));

    auto clients = api.get("/api/clients", token);
    const auto elapsed = ms_between(t0, SteadyClock::now());
    ASSERT_EQ(clients.status, 200);
    bool listed = false;
    for (const auto& c : clients.json()) listed |= c["endpoint"] == "e2e-dev";
    EXPECT_TRUE(listed);
    EXPECT_LT(elapsed, 10'000.0);
    std::cout << "  provisioning sequence took " << elapsed << " ms" << std::endl;
    dev.stop();
}

// ---------------------------------------------------------------------------

TEST(Acceptance, contract_oracle)
{
    auto report = lm2m::testing::run_contract_oracle(20241016, 1000, 16);
    EXPECT_EQ(report.sequences, 1000u);
    EXPECT_EQ(report.mismatches, 0u);
    for (const auto& f : report.failures) ADD_FAILURE() << f;
    for (const auto& label : lm2m::testing::required_outcomes())
        EXPECT_GT(report.outcomes[label], 0u) << "branch never exercised: " << label;
    std::cout << "  " << report.operations << " operations over " << report.sequences << " sequences" << std::endl;
}

// ---------------------------------------------------------------------------

TEST(Acceptance, tamper_evidence)
{
    auto dir = scratch_dir("tamper");
    auto path = dir / "chain.journal";
    auto cfg = lm2m::testing::fast_chain();
    {
        auto ledger = contracts::open_ledger(ledger::Ledger::Options{cfg, path, false, {}});
        contracts::Submitter sub(*ledger, "writer");
        std::mt19937_64 rng(7);
        while (ledger->block_count() < 20) {
            auto n = rng() % 3;
            for (std::uint64_t i = 0; i < n; ++i) {
                auto k = std::to_string(ledger->block_count()) + "-" + std::to_string(i);
                sub.submit(contracts::tx::add_anomaly({1 + rng() % 1000, "ep-" + k, "payload " + k}));
            }
            ledger->mine_block();
        }
        ASSERT_TRUE(ledger->verify_chain());
    }

    const auto pristine = ledger::journal::read_file(path);
    ledger::Executor executor(cfg, contracts::default_contracts());
    ASSERT_TRUE(ledger::verify_journal(pristine, executor));
    auto parsed = ledger::journal::parse(pristine, true);
    ASSERT_EQ(parsed.blocks.size(), 20u);

    std::mt19937_64 rng(99);
    std::size_t detected = 0;
    const std::size_t mutations = 500;
    for (std::size_t i = 0; i < mutations; ++i) {
        auto bytes = pristine;
        auto pos = rng() % bytes.size();
        bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        auto verdict = ledger::verify_journal(bytes, executor);
        if (!verdict)
            ++detected;
        else
            ADD_FAILURE() << "mutation at byte " << pos << " went unnoticed";

        // Every 25th mutation also goes through the on-disk path: reopening
        // the ledger must refuse the journal.
        if (i % 25 == 0) {
            auto copy = dir / "mutated.journal";
            {
                std::ofstream out(copy, std::ios::binary | std::ios::trunc);
                out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            }
            try {
                contracts::open_ledger(ledger::Ledger::Options{cfg, copy, false, {}});
                ADD_FAILURE() << "writer opened a journal mutated at byte " << pos;
            } catch (const ledger::LedgerError& e) {
                EXPECT_EQ(e.code(), ledger::LedgerErrc::CorruptJournal);
            }
        }
    }
    EXPECT_EQ(detected, mutations);
    std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------

TEST(Acceptance, revert_atomicity)
{
    auto cfg = lm2m::testing::fast_chain();
    cfg.difficulty_bits = 0;
    cfg.block_interval_ms = 0;
    auto subject = contracts::open_ledger(ledger::Ledger::Options{cfg, std::nullopt, false, {}});
    auto twin = contracts::open_ledger(ledger::Ledger::Options{cfg, std::nullopt, false, {}});
    contracts::Submitter s_sub(*subject, "load");
    contracts::Submitter t_sub(*twin, "load");

    std::mt19937_64 rng(5150);
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    auto record = [&](const std::string& ep) {
        return contracts::ClientRecord{ep, "coap://127.0.0.1:5683", "coap://127.0.0.1:5684", ep + "-bs",
                                       Bytes(16 + pick(48), static_cast<std::uint8_t>(pick(256))), ep + "-dm",
                                       Bytes(32, 0x44)};
    };
    auto random_tx = [&]() -> ledger::Transaction {
        auto ep = "ep-" + std::to_string(pick(6));
        ledger::Transaction tx;
        switch (pick(6)) {
        case 0: tx = contracts::tx::add_client(record(ep)); break;
        case 1: tx = contracts::tx::remove_client(ep); break;
        case 2: {
            auto name = "u" + std::to_string(pick(4));
            tx = contracts::tx::add_user(
                contracts::make_user(name, "m" + std::to_string(pick(4)) + "@x.org", "pw", Role::User));
            break;
        }
        case 3: {
            auto name = "u" + std::to_string(pick(4));
            tx = contracts::tx::update_user(
                contracts::make_user(name, "m" + std::to_string(pick(4)) + "@x.org", "pw2", Role::Admin));
            break;
        }
        case 4: {
            auto len = pick(10) == 0 ? 5000 : 1 + pick(64);
            tx = contracts::tx::add_anomaly({1 + pick(1000), ep, std::string(len, 'a')});
            break;
        }
        default: tx = contracts::tx::add_client(record(ep)); break;
        }
        if (pick(5) == 0)
            tx.gas_limit = 21000 + pick(20000); // enough to start, rarely enough to finish
        return tx;
    };

    std::size_t reverted = 0, out_of_gas = 0, applied = 0, isolated_checks = 0;
    for (int block = 0; block < 300; ++block) {
        const bool isolated = pick(3) == 0;
        const auto before = subject->state_snapshot();
        std::vector<std::pair<ledger::Transaction, ledger::Hash32>> batch;
        auto n = isolated ? 1 : 1 + pick(6);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto tx = random_tx();
            auto id = s_sub.submit(tx);
            batch.emplace_back(std::move(tx), id);
        }
        subject->mine_block();

        // The twin receives only the transactions that took effect.
        bool twin_has_work = false;
        for (const auto& [tx, id] : batch) {
            const auto r = std::get<ledger::Receipt>(subject->get_receipt(id));
            switch (r.status) {
            case ledger::TxStatus::Applied:
                ++applied;
                t_sub.submit(tx);
                twin_has_work = true;
                break;
            case ledger::TxStatus::Reverted:
                ++reverted;
                break;
            case ledger::TxStatus::OutOfGas:
                ++out_of_gas;
                EXPECT_EQ(r.gas_used, tx.gas_limit);
                break;
            }
            if (isolated && r.status != ledger::TxStatus::Applied) {
                ++isolated_checks;
                EXPECT_EQ(subject->state_snapshot(), before) << "failed tx changed state in block " << block;
            }
        }
        if (twin_has_work)
            twin->mine_block();
        ASSERT_EQ(subject->state_snapshot(), twin->state_snapshot()) << "divergence after block " << block;
    }
    EXPECT_GT(reverted, 0u);
    EXPECT_GT(out_of_gas, 0u);
    EXPECT_GT(applied, 0u);
    EXPECT_GT(isolated_checks, 0u);
    EXPECT_TRUE(subject->verify_chain());
    std::cout << "  applied " << applied << ", reverted " << reverted << ", out of gas " << out_of_gas << std::endl;
}

// ---------------------------------------------------------------------------

TEST(Acceptance, double_check)
{
    Stack stack(StackOptions{.http = false});
    auto rec = stack.make_record("dc-dev", 0x51);
    ASSERT_EQ(stack.add_client(rec).status, ledger::TxStatus::Applied);

    // A bootstrap server holding the same bootstrap credentials but a server
    // key that disagrees with the ledger.
    auto stale = rec;
    stale.server_psk_secret = lm2m::testing::secret(0x99, 32);
    auto dir = std::make_shared<contracts::MemoryClientDirectory>();
    dir->add(stale);
    bootstrap::BootstrapServer rogue(dir, {net::SockAddr::parse("127.0.0.1:0"), {500ms, 4, 1}, 0});
    rogue.start();

    auto cfg = stack.sim_config(rec);
    cfg.bootstrap_uri = "coap://" + rogue.local_addr().to_string();
    sim::SimDevice dev(cfg);
    dev.start();

    bool ever_listed = false;
    auto deadline = SteadyClock::now() + 6s;
    while (SteadyClock::now() < deadline) {
        ever_listed |= stack.dm().registrations().find_endpoint("dc-dev").has_value();
        std::this_thread::sleep_for(20ms);
    }
    EXPECT_FALSE(ever_listed);
    EXPECT_GE(rogue.provisioned(), 1u);      // bootstrap itself succeeded
    EXPECT_GE(dev.register_failures(), 1u); // registration did not
    EXPECT_EQ(dev.registrations(), 0u);
    dev.stop();

    // Identity swap: valid server key of another client, presented for this endpoint.
    auto other = stack.make_record("dc-other", 0x61);
    stack.add_client(other);
    wire::CoapEndpoint ep(net::SockAddr::parse("127.0.0.1:0"), {500ms, 4, 1});
    ep.start();
    bootstrap::BootstrapConfig swapped{stack.server_uri(), other.server_psk_identity, other.server_psk_secret};
    EXPECT_THROW(sim::register_client(ep, stack.dm().local_addr(), swapped, "dc-dev", 60, {"/3/0"}), sim::FlowError);
    EXPECT_FALSE(stack.dm().registrations().find_endpoint("dc-dev").has_value());

    // Control: the honest path registers.
    sim::SimDevice honest(stack.sim_config(rec));
    honest.start();
    EXPECT_TRUE(honest.wait_registered(10s));
    EXPECT_TRUE(stack.dm().registrations().find_endpoint("dc-dev").has_value());
}

// ---------------------------------------------------------------------------

std::map<std::string, std::map<std::uint64_t, double>> medians(const std::vector<bench::Row>& rows)
{
    std::map<std::string, std::map<std::uint64_t, double>> out;
    for (const auto& s : bench::report(rows)) out[s.scenario][s.size] = s.median;
    return out;
}

TEST(Acceptance, latency_trends)
{
    // Confirmation latency is dominated by the emulated 30 s block time.
    {
        bench::BenchOptions o;
        o.scenario = bench::Scenario::ClientAddRemove;
        o.sizes = {5};
        o.repetitions = 3;
        o.chain = ledger::ChainConfig::paper_emulation();
        auto m = medians(bench::run_scenario(o));
        for (const auto& name : {"ClientAddRemove:add", "ClientAddRemove:remove"}) {
            double v = m.at(name).at(5) / 1000.0;
            std::cout << "  paper-emulation " << name << " median " << v << " s" << std::endl;
            EXPECT_GE(v, 25.0) << name;
            EXPECT_LE(v, 35.0) << name;
        }
    }

    const std::vector<std::uint64_t> sizes = {100, 200, 300, 400, 500};

    // The plain in-memory directory beats the ledger-backed one at every size.
    {
        bench::BenchOptions o;
        o.sizes = sizes;
        o.repetitions = 100;
        o.scenario = bench::Scenario::RegisterVsStored;
        auto ledger_backed = medians(bench::run_scenario(o)).at("RegisterVsStored");
        o.scenario = bench::Scenario::InMemoryBaseline;
        auto in_memory = medians(bench::run_scenario(o)).at("InMemoryBaseline");
        for (auto n : sizes) {
            std::cout << "  size " << n << ": in-memory " << in_memory.at(n) << " ms, ledger " << ledger_backed.at(n)
                      << " ms" << std::endl;
            EXPECT_LT(in_memory.at(n), ledger_backed.at(n)) << "size " << n;
        }
    }

    // Reading every anomaly costs more as the list grows.
    {
        bench::BenchOptions o;
        o.scenario = bench::Scenario::AnomalyQueryVsCount;
        o.sizes = sizes;
        o.repetitions = 100;
        auto q = medians(bench::run_scenario(o)).at("AnomalyQueryVsCount");
        double prev = 0;
        for (auto n : sizes) {
            std::cout << "  anomalies " << n << ": " << q.at(n) << " ms" << std::endl;
            EXPECT_GE(q.at(n), prev) << "size " << n;
            prev = q.at(n);
        }
    }
}

// ---------------------------------------------------------------------------

struct Route {
    Http (Stack::*service)() const;
    std::string method;
    std::string path;
    std::string body;
    std::set<Role> allowed; // empty: public
};

TEST(Acceptance, authz_matrix)
{
    Stack stack;
    auto rec = stack.make_record("az-dev", 0x71);
    ASSERT_EQ(stack.add_client(rec).status, ledger::TxStatus::Applied);
    auto cfg = stack.sim_config(rec);
    sim::SimDevice dev(cfg);
    dev.start();
    ASSERT_TRUE(dev.wait_registered(10s));
    ASSERT_EQ(stack.add_user("ana", "right-pw", Role::User).status, ledger::TxStatus::Applied);

    const std::set<Role> admin{Role::Admin};
    const std::set<Role> api_roles{Role::Admin, Role::Application};
    const std::set<Role> everyone{Role::Admin, Role::Application, Role::User};
    const std::string res = "/api/clients/az-dev/3/0/0";
    const std::string temp = "/api/clients/az-dev/3303/0/5700";
    const std::string tx_path = "/mgmt/tx/" + std::string(64, '0');
    json new_device{{"endpoint", "az-new"},
                    {"bootstrap_uri", stack.bootstrap_uri()},
                    {"server_uri", stack.server_uri()},
                    {"bootstrap_psk_identity", "az-new-bs"},
                    {"bootstrap_psk_secret", std::string(32, 'a')},
                    {"server_psk_identity", "az-new-dm"},
                    {"server_psk_secret", std::string(32, 'b')}};

    const std::vector<Route> routes = {
        {&Stack::api, "POST", "/api/login", R"({"login":"ana","password":"right-pw"})", {}},
        {&Stack::api, "GET", "/api/clients", "", api_roles},
        {&Stack::api, "GET", res, "", api_roles},
        {&Stack::api, "PUT", "/api/clients/az-dev/1/0/1", R"({"kind":"Integer","value":60})", api_roles},
        {&Stack::api, "POST", "/api/clients/az-dev/1/0/8/exec", "", api_roles},
        {&Stack::api, "POST", temp + "/observe?subscriber=matrix", "", api_roles},
        {&Stack::api, "GET", temp + "/observe?subscriber=nobody", "", api_roles},
        {&Stack::api, "DELETE", temp + "/observe?subscriber=matrix", "", api_roles},
        {&Stack::mgmt, "POST", "/mgmt/login", R"({"login":"ana","password":"right-pw"})", {}},
        {&Stack::mgmt, "POST", "/mgmt/devices", new_device.dump(), admin},
        {&Stack::mgmt, "GET", "/mgmt/devices", "", admin},
        {&Stack::mgmt, "DELETE", "/mgmt/devices/az-none", "", admin},
        {&Stack::mgmt, "POST", "/mgmt/users",
         R"({"username":"bo","email":"bo@x.org","password":"pw","role":"User"})", admin},
        {&Stack::mgmt, "GET", "/mgmt/users", "", admin},
        {&Stack::mgmt, "PUT", "/mgmt/users/ana", R"({"email":"ana2@x.org"})", admin},
        {&Stack::mgmt, "POST", "/mgmt/anomalies", R"({"payload":"temp high"})", {Role::Admin, Role::Application}},
        {&Stack::mgmt, "GET", "/mgmt/anomalies", "", everyone},
        {&Stack::mgmt, "GET", tx_path, "", everyone},
    };

    std::size_t checked = 0;
    for (const auto& r : routes) {
        auto http = (stack.*r.service)();
        const std::string label = r.method + " " + r.path;
        for (auto role : {Role::Admin, Role::Application, Role::User}) {
            auto res_ = http.request(r.method, r.path, r.body, stack.token(role, "matrix"));
            const bool permitted = r.allowed.empty() || r.allowed.count(role);
            if (permitted) {
                EXPECT_NE(res_.status, 401) << label << " as " << contracts::to_string(role);
                EXPECT_NE(res_.status, 403) << label << " as " << contracts::to_string(role);
                EXPECT_LT(res_.status, 500) << label << " as " << contracts::to_string(role) << ": " << res_.body;
            } else {
                EXPECT_EQ(res_.status, 403) << label << " as " << contracts::to_string(role);
            }
            ++checked;
        }
        auto anon = http.request(r.method, r.path, r.body, "");
        if (r.allowed.empty())
            EXPECT_EQ(anon.status, 200) << label;
        else
            EXPECT_EQ(anon.status, 401) << label << " without a token";
        ++checked;
    }
    std::cout << "  " << checked << " role/route combinations" << std::endl;

    // Unknown user and wrong password look the same from outside.
    for (auto service : {&Stack::api, &Stack::mgmt}) {
        auto http = (stack.*service)();
        const std::string path = service == &Stack::api ? "/api/login" : "/mgmt/login";
        std::vector<double> unknown_ms, wrong_ms;
        std::optional<HttpResult> unknown_ref, wrong_ref;
        for (int i = 0; i < 30; ++i) {
            auto t0 = SteadyClock::now();
            auto u = http.post(path, R"({"login":"ghost","password":"right-pw"})");
            auto t1 = SteadyClock::now();
            auto w = http.post(path, R"({"login":"ana","password":"wrong-pw"})");
            auto t2 = SteadyClock::now();
            unknown_ms.push_back(ms_between(t0, t1));
            wrong_ms.push_back(ms_between(t1, t2));
            EXPECT_EQ(u.status, w.status);
            EXPECT_EQ(u.body, w.body);
            EXPECT_EQ(u.content_type, w.content_type);
            if (!unknown_ref) {
                unknown_ref = u;
                wrong_ref = w;
            }
        }
        EXPECT_EQ(unknown_ref->status, 401);
        std::sort(unknown_ms.begin(), unknown_ms.end());
        std::sort(wrong_ms.begin(), wrong_ms.end());
        const double mu = unknown_ms[15], mw = wrong_ms[15];
        std::cout << "  " << path << " median unknown " << mu << " ms, wrong password " << mw << " ms" << std::endl;
        EXPECT_GE(unknown_ms.front(), 25.0);
        EXPECT_GE(wrong_ms.front(), 25.0);
        EXPECT_LE(std::abs(mw - mu), 0.10 * mu);
    }
    dev.stop();
}

// ---------------------------------------------------------------------------

wire::Message random_valid_message(std::mt19937_64& rng, const std::vector<std::uint8_t>& codes)
{
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    wire::Message m;
    m.type = static_cast<wire::MessageType>(pick(4));
    m.code = static_cast<wire::Code>(codes[pick(codes.size())]);
    m.message_id = static_cast<std::uint16_t>(rng());
    m.token.resize(pick(wire::kMaxToken + 1));
    for (auto& b : m.token) b = static_cast<std::uint8_t>(rng());
    m.observe = static_cast<wire::Observe>(pick(3));
    auto path_len = pick(8) == 0 ? pick(wire::kMaxPath + 1) : pick(24);
    for (std::uint64_t i = 0; i < path_len; ++i) m.path.push_back(static_cast<char>(0x21 + pick(0x5e)));
    auto payload_len = pick(16) == 0 ? pick(4096) : pick(64);
    m.payload.resize(payload_len);
    for (auto& b : m.payload) b = static_cast<std::uint8_t>(rng());
    return m;
}

TEST(Acceptance, codec_fuzz)
{
    std::vector<std::uint8_t> codes;
    for (int c = 0; c < 256; ++c)
        if (wire::is_known_code(static_cast<std::uint8_t>(c)))
            codes.push_back(static_cast<std::uint8_t>(c));
    ASSERT_FALSE(codes.empty());

    std::mt19937_64 rng(1234567);

    // Round trips.
    std::size_t round_trip_failures = 0;
    std::vector<Bytes> seeds;
    for (int i = 0; i < 100'000; ++i) {
        auto m = random_valid_message(rng, codes);
        auto bytes = wire::encode(m);
        if (wire::decode(bytes) != m)
            ++round_trip_failures;
        if (i % 100 == 0)
            seeds.push_back(std::move(bytes));
    }
    EXPECT_EQ(round_trip_failures, 0u);

    // Random datagrams: half pure noise, half mutations of valid encodings.
    std::size_t accepted = 0, rejected = 0, foreign = 0, unstable = 0;
    for (int i = 0; i < 1'000'000; ++i) {
        Bytes d;
        if (i % 2 == 0) {
            d.resize(rng() % 80);
            for (auto& b : d) b = static_cast<std::uint8_t>(rng());
        } else {
            d = seeds[rng() % seeds.size()];
            auto edits = 1 + rng() % 4;
            for (std::uint64_t e = 0; e < edits; ++e) {
                switch (rng() % 3) {
                case 0:
                    if (!d.empty())
                        d[rng() % d.size()] = static_cast<std::uint8_t>(rng());
                    break;
                case 1:
                    if (!d.empty())
                        d.resize(rng() % d.size());
                    break;
                default: d.push_back(static_cast<std::uint8_t>(rng())); break;
                }
            }
        }
        try {
            auto m = wire::decode(d);
            ++accepted;
            if (wire::encode(m) != d)
                ++unstable;
        } catch (const wire::WireError&) {
            ++rejected;
        } catch (...) {
            ++foreign;
        }
    }
    EXPECT_EQ(foreign, 0u) << "decode threw something other than WireError";
    EXPECT_EQ(unstable, 0u) << "accepted datagrams must be canonical";
    EXPECT_EQ(accepted + rejected, 1'000'000u);
    std::cout << "  1e6 datagrams: " << accepted << " accepted, " << rejected << " rejected" << std::endl;

    // A live endpoint keeps serving after a burst of garbage.
    wire::CoapEndpoint server(net::SockAddr::parse("127.0.0.1:0"), {300ms, 2, 1});
    Bytes psk(16, 0x5c);
    server.set_psk_resolver([&](const net::SockAddr&, const std::string&) { return std::optional<Bytes>(psk); });
    server.on_request([](const wire::Incoming& in) { return wire::make_response(in.msg, wire::Code::Content); });
    server.start();
    net::UdpSocket noise(net::SockAddr::parse("127.0.0.1:0"));
    for (int i = 0; i < 20'000; ++i) {
        Bytes d(rng() % 120);
        for (auto& b : d) b = static_cast<std::uint8_t>(rng());
        if (i % 3 == 0 && !seeds.empty())
            d = seeds[rng() % seeds.size()];
        noise.send_to(server.local_addr(), d);
    }
    wire::CoapEndpoint client(net::SockAddr::parse("127.0.0.1:0"), {500ms, 4, 1});
    client.start();
    EXPECT_NO_THROW(client.handshake(server.local_addr(), "fuzz", psk));
    wire::Message get;
    get.code = wire::Code::Get;
    get.path = "/3/0/0";
    EXPECT_EQ(client.request(server.local_addr(), get).code, wire::Code::Content);
}

// ---------------------------------------------------------------------------

TEST(Acceptance, observe)
{
    Stack stack;
    auto rec = stack.make_record("obs-dev", 0x81);
    ASSERT_EQ(stack.add_client(rec).status, ledger::TxStatus::Applied);
    auto cfg = stack.sim_config(rec);
    cfg.temp_period_s = 2.0;
    sim::SimDevice dev(cfg);
    dev.start();
    ASSERT_TRUE(dev.wait_registered(10s));

    auto token = stack.token(Role::Application, "observer");
    const std::string base = "/api/clients/obs-dev/3303/0/5700/observe";
    ASSERT_EQ(stack.api().post(base, "", token).status, 200);
    const auto subscribed = SteadyClock::now();

    SseReader reader;
    auto port = stack.api().port();
    auto stream = std::async(std::launch::async, [&] { return reader.run(port, base, token); });

    // The first event is the value returned by the observe request itself;
    // notifications are the ones after it.
    std::this_thread::sleep_until(subscribed + 10s);
    const auto in_window = reader.count();
    const std::size_t notifications = in_window > 0 ? in_window - 1 : 0;
    std::cout << "  " << notifications << " notifications in 10 s" << std::endl;
    EXPECT_GE(notifications, 3u);

    ASSERT_EQ(stack.api().del(base, token).status, 200);
    const auto cancelled = SteadyClock::now();
    const auto sent_at_cancel = dev.notifications_sent();
    auto ended = stream.wait_for(10s);
    EXPECT_EQ(ended, std::future_status::ready) << "stream still open after cancel";
    if (ended != std::future_status::ready) {
        reader.abort = true;
        stream.wait();
    }
    std::this_thread::sleep_for(5s);

    std::size_t after_cancel = 0;
    {
        std::lock_guard lk(reader.mu);
        for (auto t : reader.events) after_cancel += t > cancelled;
    }
    EXPECT_EQ(after_cancel, 0u);
    EXPECT_EQ(dev.notifications_sent(), sent_at_cancel) << "device kept notifying after cancel";
    dev.stop();
}

} // namespace
