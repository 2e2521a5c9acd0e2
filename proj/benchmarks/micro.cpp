#include "lm2m/contracts/api.hpp"
#include "lm2m/wire/message.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lm2m;

namespace {

wire::Message sample_message(std::size_t payload)
{
    wire::Message m;
    m.type = wire::MessageType::Con;
    m.code = wire::Code::Post;
    m.message_id = 0x1234;
    m.token = {1, 2, 3, 4};
    m.path = "/rd?ep=bench-device&lt=300";
    m.payload.assign(payload, 0x5a);
    return m;
}

void BM_WireEncode(benchmark::State& state)
{
    auto m = sample_message(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wire::encode(m));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WireEncode)->Arg(0)->Arg(64)->Arg(1024);

void BM_WireDecode(benchmark::State& state)
{
    auto bytes = wire::encode(sample_message(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(wire::decode(bytes));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WireDecode)->Arg(0)->Arg(64)->Arg(1024);

ledger::ChainConfig chain(std::uint32_t bits)
{
    ledger::ChainConfig c;
    c.difficulty_bits = bits;
    c.block_interval_ms = 0;
    return c;
}

contracts::ClientRecord record(std::size_t i)
{
    auto ep = "bench-" + std::to_string(i);
    return {ep, "coap://127.0.0.1:5683", "coap://127.0.0.1:5684", ep + "-bs", Bytes(32, 0x11), ep + "-dm",
            Bytes(32, 0x22)};
}

// Proof of work dominates: expected cost doubles per difficulty bit.
void BM_MineEmptyBlock(benchmark::State& state)
{
    auto ledger = contracts::open_ledger({chain(static_cast<std::uint32_t>(state.range(0))), std::nullopt, false, {}});
    for (auto _ : state) ledger->mine_block();
}
BENCHMARK(BM_MineEmptyBlock)->Arg(0)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_AddClientTx(benchmark::State& state)
{
    auto ledger = contracts::open_ledger({chain(0), std::nullopt, false, {}});
    contracts::Submitter sub(*ledger, "bench");
    std::size_t i = 0;
    for (auto _ : state) {
        sub.submit(contracts::tx::add_client(record(i++)));
        ledger->mine_block();
    }
}
BENCHMARK(BM_AddClientTx)->Unit(benchmark::kMicrosecond);

void BM_GetClient(benchmark::State& state)
{
    auto ledger = contracts::open_ledger({chain(0), std::nullopt, false, {}});
    contracts::Submitter sub(*ledger, "bench");
    const auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) sub.submit(contracts::tx::add_client(record(i)));
    ledger->mine_block();
    contracts::Queries q(*ledger);
    const auto target = record(n / 2).endpoint;
    for (auto _ : state) benchmark::DoNotOptimize(q.get_client(target));
}
BENCHMARK(BM_GetClient)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_AllAnomalies(benchmark::State& state)
{
    auto ledger = contracts::open_ledger({chain(0), std::nullopt, false, {}});
    contracts::Submitter sub(*ledger, "bench");
    const auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) sub.submit(contracts::tx::add_anomaly({1 + i, "bench-0", "over threshold"}));
    ledger->mine_block();
    contracts::Queries q(*ledger);
    for (auto _ : state) benchmark::DoNotOptimize(q.all_anomalies());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllAnomalies)->Arg(10)->Arg(100)->Arg(200)->Arg(300)->Arg(400)->Arg(500)->Complexity()->Unit(benchmark::kMicrosecond);

void BM_ValidateLogin(benchmark::State& state)
{
    auto ledger = contracts::open_ledger({chain(0), std::nullopt, false, {}});
    contracts::Submitter sub(*ledger, "bench");
    const auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) {
        auto name = "user" + std::to_string(i);
        sub.submit(contracts::tx::add_user(contracts::make_user(name, name + "@x.org", "pw", contracts::Role::User)));
    }
    ledger->mine_block();
    contracts::Queries q(*ledger);
    const auto target = "user" + std::to_string(n - 1);
    for (auto _ : state) benchmark::DoNotOptimize(q.validate_login(target));
}
BENCHMARK(BM_ValidateLogin)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
