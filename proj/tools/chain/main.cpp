// lm2m-chain: offline verification and inspection of a chain journal.

#include "support/tool_support.hpp"

#include "lm2m/contracts/stores.hpp"
#include "lm2m/ledger/journal.hpp"

#include <iostream>

using namespace lm2m;

int main(int argc, char** argv)
{
    CLI::App app{"Chain journal utilities"};
    app.require_subcommand(1);
    tools::CommonFlags common;
    common.log_level = "warn";
    common.add_to(app);
    std::string journal;

    auto* verify = app.add_subcommand("verify", "replay the journal and check every block");
    verify->add_option("journal", journal)->required()->check(CLI::ExistingFile);
    bool show_txs = false;
    auto* inspect = app.add_subcommand("inspect", "list blocks and their transactions");
    inspect->add_option("journal", journal)->required()->check(CLI::ExistingFile);
    inspect->add_flag("--txs", show_txs, "print every transaction");
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        auto bytes = ledger::journal::read_file(journal);
        ledger::Executor executor(tools::load_chain_config(common.chain_config, common.profile),
                                  contracts::default_contracts());
        if (*verify) {
            auto verdict = ledger::verify_journal(bytes, executor);
            if (verdict.ok) {
                std::cout << "ok\n";
                return 0;
            }
            std::cout << "invalid at height " << verdict.first_bad_height.value_or(0) << ": " << verdict.reason << "\n";
            return 3;
        }
        auto parsed = ledger::journal::parse(bytes, true);
        for (const auto& b : parsed.blocks) {
            std::cout << b.height << " " << b.hash.hex() << " ts=" << b.timestamp_ms << " txs=" << b.txs.size() << "\n";
            if (show_txs)
                for (const auto& t : b.txs)
                    std::cout << "  " << t.tx_id.hex() << " " << t.caller << "#" << t.nonce << " " << t.contract << "."
                              << t.function << " args=" << t.args.size() << "B\n";
        }
        if (parsed.error) {
            std::cout << "journal error after " << parsed.blocks.size() << " blocks: " << *parsed.error << "\n";
            return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
