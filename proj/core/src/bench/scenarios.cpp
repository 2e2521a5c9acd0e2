#include "lm2m/bench/scenarios.hpp"

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/contracts/directory.hpp"
#include "lm2m/dm/dm_server.hpp"
#include "lm2m/sim/client_flow.hpp"
#include "lm2m/sim/fleet.hpp"

#include <algorithm>
#include <random>

namespace lm2m::bench {

using Clock = std::chrono::steady_clock;
using contracts::ClientRecord;

namespace {

constexpr std::array kNames = {
    std::pair{Scenario::RegisterVsStored, std::string_view("RegisterVsStored")},
    std::pair{Scenario::ClientAddRemove, std::string_view("ClientAddRemove")},
    std::pair{Scenario::LoginVsUsers, std::string_view("LoginVsUsers")},
    std::pair{Scenario::AnomalyQueryVsCount, std::string_view("AnomalyQueryVsCount")},
    std::pair{Scenario::AnomalyAdd, std::string_view("AnomalyAdd")},
    std::pair{Scenario::InMemoryBaseline, std::string_view("InMemoryBaseline")},
};

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Bytes secret_for(std::mt19937_64& rng)
{
    Bytes b(32);
    for (auto& x : b)
        x = static_cast<std::uint8_t>(rng());
    return b;
}

std::vector<ClientRecord> make_clients(std::uint64_t n, const std::string& bs_uri, const std::string& dm_uri,
                                       std::mt19937_64& rng, std::string_view prefix = "bench")
{
    std::vector<ClientRecord> out;
    out.reserve(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
        auto ep = sim::fleet_endpoint_name(prefix, i);
        out.push_back(ClientRecord{ep, bs_uri, dm_uri, ep + "-bs", secret_for(rng), ep + "-dm", secret_for(rng)});
    }
    return out;
}

/// In-process chain with the three contracts.
struct Chain {
    std::unique_ptr<ledger::Ledger> ledger;
    contracts::Submitter submitter;

    explicit Chain(const ledger::ChainConfig& cfg)
        : ledger(contracts::open_ledger(ledger::Ledger::Options{cfg, std::nullopt, false, {}})),
          submitter(*ledger, "bench")
    {
    }

    ~Chain() { ledger->stop(); }

    /// Submits everything into one block and mines it synchronously.
    void prefill(const std::vector<ledger::Transaction>& txs)
    {
        if (txs.empty())
            return;
        std::vector<ledger::Hash32> ids;
        ids.reserve(txs.size());
        for (const auto& t : txs)
            ids.push_back(submitter.submit(t));
        ledger->mine_block();
        for (const auto& id : ids) {
            auto r = ledger->get_receipt(id);
            if (!std::holds_alternative<ledger::Receipt>(r) ||
                std::get<ledger::Receipt>(r).status != ledger::TxStatus::Applied)
                throw ScenarioSetupFailed("prefill transaction was not applied");
        }
    }

    double confirm(ledger::Transaction tx, ledger::TxStatus expect)
    {
        auto t0 = Clock::now();
        auto id = submitter.submit(std::move(tx));
        auto r = ledger->wait_for_receipt(id, std::chrono::minutes(5));
        auto elapsed = ms_since(t0);
        if (!r || r->status != expect)
            throw ScenarioSetupFailed("transaction did not reach the expected status");
        return elapsed;
    }
};

class Emitter {
public:
    Emitter(const BenchOptions& o, std::vector<Row>& rows) : o_(o), rows_(rows) {}

    void operator()(std::string scenario, std::uint64_t size, std::uint64_t rep, double ms)
    {
        rows_.push_back(Row{std::move(scenario), size, rep, ms});
        if (o_.on_row)
            o_.on_row(rows_.back());
    }

private:
    const BenchOptions& o_;
    std::vector<Row>& rows_;
};

/// Bootstrap + DM servers over `directory`; clients run the full flow against them.
void run_registration(std::string_view name, std::uint64_t size, const BenchOptions& o, Emitter& emit,
                      std::mt19937_64& rng, bool in_memory)
{
    wire::EndpointOptions ep_opts{std::chrono::milliseconds(1000), 4, 2};
    std::shared_ptr<contracts::ClientDirectory> directory;
    std::unique_ptr<Chain> chain;
    std::shared_ptr<contracts::MemoryClientDirectory> memory;
    if (in_memory) {
        memory = std::make_shared<contracts::MemoryClientDirectory>();
        directory = memory;
    } else {
        chain = std::make_unique<Chain>(o.chain);
        directory = std::make_shared<contracts::LedgerClientDirectory>(*chain->ledger);
    }

    auto loopback = net::SockAddr::parse("127.0.0.1:0");
    bootstrap::BootstrapServer bs(directory, {loopback, ep_opts, 0});
    dm::DmServer dm(directory, {loopback, ep_opts, std::chrono::milliseconds(1000), 64, {}});
    auto bs_uri = "coap://" + bs.local_addr().to_string();
    auto dm_uri = "coap://" + dm.local_addr().to_string();

    auto records = make_clients(size, bs_uri, dm_uri, rng);
    if (in_memory) {
        for (const auto& r : records)
            memory->add(r);
    } else {
        std::vector<ledger::Transaction> txs;
        for (const auto& r : records)
            txs.push_back(contracts::tx::add_client(r));
        chain->prefill(txs);
    }
    bs.start();
    dm.start();

    std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
    const std::vector<std::string> links = {"/1/0", "/3/0", "/3303/0"};
    for (std::uint64_t rep = 0; rep < o.repetitions; ++rep) {
        const auto& rec = records[pick(rng)];
        wire::CoapEndpoint client(loopback, {std::chrono::milliseconds(1000), 4, 1});
        client.start();
        std::string reg;
        auto t0 = Clock::now();
        try {
            auto cfg = sim::bootstrap(client, bs.local_addr(), rec.bootstrap_psk_identity, rec.bootstrap_psk_secret,
                                      rec.endpoint);
            reg = sim::register_client(client, dm.local_addr(), cfg, rec.endpoint, 60, links);
        } catch (const sim::FlowError& e) {
            throw ScenarioSetupFailed(std::string("registration flow failed: ") + e.what());
        }
        emit(std::string(name), size, rep, ms_since(t0));
        sim::deregister(client, dm.local_addr(), reg);
        client.stop();
    }
    dm.stop();
    bs.stop();
}

std::unique_ptr<Chain> anomaly_chain(const ledger::ChainConfig& cfg, std::uint64_t size)
{
    auto chain = std::make_unique<Chain>(cfg);
    std::vector<ledger::Transaction> txs;
    for (std::uint64_t i = 1; i <= size; ++i)
        txs.push_back(contracts::tx::add_anomaly(
            contracts::AnomalyRecord{1'600'000'000'000 + i, "bench", "temperature above threshold #" + std::to_string(i)}));
    chain->prefill(txs);
    return chain;
}

/// A single read takes tens of microseconds, shorter than the host's speed
/// drifts. Sampling every size in each round spreads those drifts evenly.
void run_anomaly_queries(const std::string& name, const BenchOptions& o, Emitter& emit)
{
    std::vector<std::unique_ptr<Chain>> chains;
    for (auto size : o.sizes) chains.push_back(anomaly_chain(o.chain, size));
    std::vector<std::vector<double>> samples(o.sizes.size());
    for (std::uint64_t rep = 0; rep < o.repetitions; ++rep) {
        for (std::size_t i = 0; i < chains.size(); ++i) {
            contracts::Queries q(*chains[i]->ledger);
            auto t0 = Clock::now();
            auto all = q.all_anomalies();
            auto ms = ms_since(t0);
            if (all.size() != o.sizes[i])
                throw ScenarioSetupFailed("anomaly count mismatch");
            samples[i].push_back(ms);
        }
    }
    for (std::size_t i = 0; i < chains.size(); ++i)
        for (std::uint64_t rep = 0; rep < o.repetitions; ++rep) emit(name, o.sizes[i], rep, samples[i][rep]);
}

} // namespace

std::string_view to_string(Scenario s)
{
    for (const auto& [k, v] : kNames)
        if (k == s)
            return v;
    return "Unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name)
{
    for (const auto& [k, v] : kNames)
        if (v == name)
            return k;
    return std::nullopt;
}

const std::vector<Scenario>& all_scenarios()
{
    static const std::vector<Scenario> all = [] {
        std::vector<Scenario> v;
        for (const auto& [k, name] : kNames)
            v.push_back(k);
        return v;
    }();
    return all;
}

std::vector<Row> run_scenario(const BenchOptions& o)
{
    if (o.sizes.empty() || !std::is_sorted(o.sizes.begin(), o.sizes.end()) ||
        std::adjacent_find(o.sizes.begin(), o.sizes.end()) != o.sizes.end())
        throw std::invalid_argument("sizes must be non-empty and strictly ascending");
    if (o.repetitions == 0)
        throw std::invalid_argument("repetitions must be positive");

    std::vector<Row> rows;
    Emitter emit(o, rows);
    std::mt19937_64 rng(o.seed);
    const auto name = std::string(to_string(o.scenario));

    if (o.scenario == Scenario::AnomalyQueryVsCount) {
        run_anomaly_queries(name, o, emit);
        return rows;
    }

    for (auto size : o.sizes) {
        switch (o.scenario) {
        case Scenario::RegisterVsStored:
        case Scenario::InMemoryBaseline:
            if (size == 0)
                throw std::invalid_argument(name + " needs at least one stored client");
            run_registration(name, size, o, emit, rng, o.scenario == Scenario::InMemoryBaseline);
            break;

        case Scenario::ClientAddRemove: {
            Chain chain(o.chain);
            std::vector<ledger::Transaction> txs;
            for (const auto& r : make_clients(size, "coap://127.0.0.1:5683", "coap://127.0.0.1:5684", rng))
                txs.push_back(contracts::tx::add_client(r));
            chain.prefill(txs);
            chain.ledger->start_auto_mining();
            auto extra = make_clients(o.repetitions, "coap://127.0.0.1:5683", "coap://127.0.0.1:5684", rng, "extra");
            for (std::uint64_t rep = 0; rep < o.repetitions; ++rep) {
                const auto& r = extra[rep];
                emit(name + ":add", size, rep, chain.confirm(contracts::tx::add_client(r), ledger::TxStatus::Applied));
                emit(name + ":remove", size, rep,
                     chain.confirm(contracts::tx::remove_client(r.endpoint), ledger::TxStatus::Applied));
            }
            break;
        }

        case Scenario::LoginVsUsers: {
            Chain chain(o.chain);
            std::vector<ledger::Transaction> txs;
            for (std::uint64_t i = 1; i <= size; ++i) {
                auto n = std::to_string(i);
                txs.push_back(contracts::tx::add_user(
                    contracts::make_user("user" + n, "user" + n + "@bench.local", "pw-" + n, contracts::Role::User)));
            }
            chain.prefill(txs);
            auth::TokenService tokens(crypto::random_bytes(auth::kSecretSize));
            auth::AuthService auth(*chain.ledger, tokens, std::chrono::milliseconds(0));
            std::uniform_int_distribution<std::uint64_t> pick(1, std::max<std::uint64_t>(size, 1));
            for (std::uint64_t rep = 0; rep < o.repetitions; ++rep) {
                auto n = std::to_string(pick(rng));
                auto t0 = Clock::now();
                try {
                    auth.login("user" + n, "pw-" + n);
                } catch (const auth::InvalidCredentials&) {
                    if (size > 0)
                        throw ScenarioSetupFailed("login of a seeded user failed");
                }
                emit(name, size, rep, ms_since(t0));
            }
            break;
        }

        case Scenario::AnomalyQueryVsCount: break; // handled above

        case Scenario::AnomalyAdd: {
            auto chain = anomaly_chain(o.chain, size);
            chain->ledger->start_auto_mining();
            for (std::uint64_t rep = 0; rep < o.repetitions; ++rep)
                emit(name, size, rep,
                     chain->confirm(contracts::tx::add_anomaly(contracts::AnomalyRecord{
                                        1'700'000'000'000 + rep, "bench", "new anomaly " + std::to_string(rep)}),
                                    ledger::TxStatus::Applied));
            break;
        }
        }
    }
    return rows;
}

} // namespace lm2m::bench
