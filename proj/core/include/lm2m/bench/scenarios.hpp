#pragma once

#include "lm2m/bench/report.hpp"
#include "lm2m/ledger/types.hpp"

#include <functional>
#include <optional>

namespace lm2m::bench {

enum class Scenario { RegisterVsStored, ClientAddRemove, LoginVsUsers, AnomalyQueryVsCount, AnomalyAdd, InMemoryBaseline };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);
const std::vector<Scenario>& all_scenarios();

class ScenarioSetupFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BenchOptions {
    Scenario scenario = Scenario::RegisterVsStored;
    /// Non-empty and ascending.
    std::vector<std::uint64_t> sizes = {100, 200, 300, 400, 500};
    std::uint64_t repetitions = 100;
    ledger::ChainConfig chain = ledger::ChainConfig::desk();
    std::uint64_t seed = 1;
    /// Called after every measured row.
    std::function<void(const Row&)> on_row;
};

/// Runs one scenario on a fresh chain per size and returns one row per
/// measured operation. ClientAddRemove emits "ClientAddRemove:add" and
/// "ClientAddRemove:remove" rows. RegisterVsStored and InMemoryBaseline time
/// bootstrap plus registration end to end, handshakes included.
/// Throws ScenarioSetupFailed, std::invalid_argument for bad options.
std::vector<Row> run_scenario(const BenchOptions& options);

} // namespace lm2m::bench
