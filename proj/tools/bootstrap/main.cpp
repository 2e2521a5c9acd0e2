// lm2m-bootstrap: LwM2M bootstrap server reading client credentials from the chain journal.

#include "support/tool_support.hpp"

#include "lm2m/bootstrap/bootstrap_server.hpp"
#include "lm2m/contracts/directory.hpp"
#include "lm2m/contracts/stores.hpp"

#include <spdlog/spdlog.h>

using namespace lm2m;

int main(int argc, char** argv)
{
    CLI::App app{"LwM2M bootstrap server"};
    tools::CommonFlags common;
    common.add_to(app);
    std::string bind, journal, contract;
    unsigned max_failures = 0;
    auto* o_bind = app.add_option("--bind", bind, "UDP bind address (default 0.0.0.0:5683)");
    auto* o_journal = app.add_option("--journal", journal, "chain journal written by the mining process");
    auto* o_contract = app.add_option("--contract", contract, "client credential contract name (default ClientStore)");
    auto* o_fail = app.add_option("--max-failures-per-minute", max_failures, "failed handshakes per peer before refusing; 0 = unlimited");
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        tools::Settings s(common.config, "LM2M_BS_");
        s.set_if(o_bind, "bind", bind);
        s.set_if(o_journal, "journal", journal);
        s.set_if(o_contract, "contract", contract);
        s.set_if(o_fail, "max_failures_per_minute", std::to_string(max_failures));

        if (s.get_or("contract", std::string(contracts::kClientStore)) != contracts::kClientStore)
            throw std::invalid_argument("only the ClientStore contract is deployed on this chain");
        auto journal_path = s.get_or("journal", "");
        if (journal_path.empty())
            throw std::invalid_argument("--journal is required");

        tools::block_termination_signals();
        auto chain = tools::open_chain(tools::load_chain_config(common.chain_config, common.profile), journal_path, true);
        chain->start_following(std::chrono::milliseconds(200));

        bootstrap::BootstrapServerOptions opts;
        opts.bind = net::SockAddr::parse(s.get_or("bind", "0.0.0.0:5683"));
        opts.max_failures_per_minute = static_cast<unsigned>(s.get_u64_or("max_failures_per_minute", 0));
        bootstrap::BootstrapServer server(std::make_shared<contracts::LedgerClientDirectory>(*chain), opts);
        server.start();
        spdlog::info("bootstrap server on udp {} following {}", server.local_addr().to_string(), journal_path);

        tools::wait_for_termination();
        spdlog::info("shutting down: {} provisioned, {} rejected", server.provisioned(), server.rejected());
        server.stop();
        chain->stop();
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
