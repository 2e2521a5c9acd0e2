// lm2m-node: ledger, bootstrap server, DM server and both HTTP services in one process.

#include "support/tool_support.hpp"

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/bootstrap/bootstrap_server.hpp"
#include "lm2m/contracts/directory.hpp"
#include "lm2m/dm/rest_api.hpp"
#include "lm2m/mgmt/mgmt_service.hpp"

#include <spdlog/spdlog.h>

using namespace lm2m;

int main(int argc, char** argv)
{
    CLI::App app{"All LwM2M suite services in one process"};
    tools::CommonFlags common;
    common.add_to(app);
    std::string journal, secret_file = "lm2m-token.secret", seed_admin, cors = "*";
    std::string bs_bind = "0.0.0.0:5683", dm_bind = "0.0.0.0:5684";
    std::string api_bind = "0.0.0.0:8081", mgmt_bind = "0.0.0.0:8080";
    app.add_option("--journal", journal, "chain journal; in-memory chain when omitted");
    app.add_option("--secret-file", secret_file, "token secret, created on first start");
    app.add_option("--seed-admin", seed_admin, "key=value file with admin_username, admin_email, admin_password");
    app.add_option("--bs-bind", bs_bind, "bootstrap server UDP address");
    app.add_option("--dm-bind", dm_bind, "DM server UDP address");
    app.add_option("--api-bind", api_bind, "/api HTTP address");
    app.add_option("--mgmt-bind", mgmt_bind, "/mgmt HTTP address");
    app.add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        tools::block_termination_signals();
        auto chain = tools::open_chain(tools::load_chain_config(common.chain_config, common.profile), journal, false);
        chain->start_auto_mining();
        contracts::Submitter submitter(*chain, "mgmt");
        if (!seed_admin.empty()) {
            auto result = auth::bootstrap_admin(*chain, submitter, auth::AdminSeed::from(KeyValueConfig::load(seed_admin)));
            spdlog::info("admin seeding: {}", auth::to_string(result));
        }

        auth::TokenService tokens(auth::load_or_create_secret(secret_file));
        auth::AuthService auth(*chain, tokens);
        auto directory = std::make_shared<contracts::LedgerClientDirectory>(*chain);

        bootstrap::BootstrapServerOptions bs_opts;
        bs_opts.bind = net::SockAddr::parse(bs_bind);
        bootstrap::BootstrapServer bs(directory, bs_opts);
        dm::DmServerOptions dm_opts;
        dm_opts.bind = net::SockAddr::parse(dm_bind);
        dm::DmServer dm(directory, dm_opts);
        dm::RestApi api(dm, tokens, &auth, tools::parse_http_bind(api_bind, cors));
        mgmt::MgmtService mgmt(*chain, submitter, auth, tools::parse_http_bind(mgmt_bind, cors));

        bs.start();
        dm.start();
        api.start();
        mgmt.start();
        spdlog::info("bootstrap udp {}, dm udp {}, api http {}, mgmt http {}", bs.local_addr().to_string(),
                     dm.local_addr().to_string(), api.port(), mgmt.port());

        tools::wait_for_termination();
        mgmt.stop();
        api.stop();
        dm.stop();
        bs.stop();
        chain->stop();
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
