// lm2m-bench: latency scenarios against the embedded chain, written as CSV.

#include "support/tool_support.hpp"

#include "lm2m/bench/scenarios.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

using namespace lm2m;

namespace {

std::vector<std::uint64_t> parse_sizes(const std::string& text)
{
    std::vector<std::uint64_t> sizes;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto end = comma == std::string::npos ? text.size() : comma;
        sizes.push_back(parse_u64(std::string_view(text).substr(start, end - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return sizes;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Latency benchmark harness"};
    tools::CommonFlags common;
    common.log_level = "warn";
    common.add_to(app);

    std::vector<std::string> names;
    for (auto s : bench::all_scenarios())
        names.emplace_back(bench::to_string(s));
    std::string scenario, sizes = "100,200,300,400,500", out;
    std::uint64_t reps = 100, seed = 1;
    app.add_option("--scenario", scenario, "scenario name")->check(CLI::IsMember(names));
    app.add_option("--sizes", sizes, "comma-separated ascending sizes");
    app.add_option("--reps", reps, "repetitions per size")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "workload seed");
    app.add_option("--out", out, "CSV output file (stdout when omitted)");

    std::string report_in;
    auto* report = app.add_subcommand("report", "summarize a CSV file: median and p95 per scenario and size");
    report->add_option("csv", report_in, "CSV produced by a run")->required()->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        if (*report) {
            std::ifstream in(report_in);
            bench::write_report(std::cout, bench::report(bench::read_csv(in)));
            return 0;
        }
        if (scenario.empty())
            throw std::invalid_argument("--scenario is required");

        bench::BenchOptions o;
        o.scenario = *bench::parse_scenario(scenario);
        o.sizes = parse_sizes(sizes);
        o.repetitions = reps;
        o.seed = seed;
        o.chain = tools::load_chain_config(common.chain_config, common.profile);

        std::ofstream file;
        if (!out.empty()) {
            file.open(out, std::ios::trunc);
            if (!file)
                throw std::runtime_error("cannot open " + out);
        }
        std::ostream& csv = out.empty() ? std::cout : file;
        csv << bench::kCsvHeader << "\n";
        o.on_row = [&](const bench::Row& r) {
            bench::write_csv(csv, {r}, false);
            csv.flush();
        };
        auto rows = bench::run_scenario(o);
        if (!out.empty())
            bench::write_report(std::cerr, bench::report(rows));
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
