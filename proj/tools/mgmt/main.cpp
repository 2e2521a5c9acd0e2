// lm2m-mgmt: management back end; the process that mines the chain.

#include "support/tool_support.hpp"

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/contracts/api.hpp"
#include "lm2m/mgmt/mgmt_service.hpp"

#include <spdlog/spdlog.h>

using namespace lm2m;

int main(int argc, char** argv)
{
    CLI::App app{"Management service and chain miner"};
    tools::CommonFlags common;
    common.add_to(app);
    std::string http_bind, journal, secret_file, seed_admin, cors;
    auto* o_http = app.add_option("--http-bind", http_bind, "HTTP bind address (default 0.0.0.0:8080)");
    auto* o_journal = app.add_option("--journal", journal, "chain journal; created when absent");
    auto* o_secret = app.add_option("--secret-file", secret_file, "token secret, created on first start");
    auto* o_seed = app.add_option("--seed-admin", seed_admin, "key=value file with admin_username, admin_email, admin_password");
    auto* o_cors = app.add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        tools::Settings s(common.config, "LM2M_MGMT_");
        s.set_if(o_http, "http_bind", http_bind);
        s.set_if(o_journal, "journal", journal);
        s.set_if(o_secret, "secret_file", secret_file);
        s.set_if(o_seed, "seed_admin", seed_admin);
        s.set_if(o_cors, "cors_origin", cors);

        auto journal_path = s.get_or("journal", "");
        if (journal_path.empty())
            throw std::invalid_argument("--journal is required");

        tools::block_termination_signals();
        auto chain = tools::open_chain(tools::load_chain_config(common.chain_config, common.profile), journal_path, false);
        chain->start_auto_mining();
        contracts::Submitter submitter(*chain, "mgmt");

        if (auto seed_file = s.get("seed_admin")) {
            auto result = auth::bootstrap_admin(*chain, submitter, auth::AdminSeed::from(KeyValueConfig::load(*seed_file)));
            spdlog::info("admin seeding: {}", auth::to_string(result));
        }

        auth::TokenService tokens(auth::load_or_create_secret(s.get_or("secret_file", "lm2m-token.secret")));
        auth::AuthService auth(*chain, tokens);
        mgmt::MgmtService service(*chain, submitter, auth,
                                  tools::parse_http_bind(s.get_or("http_bind", "0.0.0.0:8080"), s.get_or("cors_origin", "*")));
        service.start();
        spdlog::info("mgmt service on http port {}, journal {}", service.port(), journal_path);

        tools::wait_for_termination();
        service.stop();
        chain->stop();
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
