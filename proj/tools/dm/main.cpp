// lm2m-dm: LwM2M device-management server plus the /api HTTP front end.

#include "support/tool_support.hpp"

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/contracts/directory.hpp"
#include "lm2m/dm/rest_api.hpp"

#include <spdlog/spdlog.h>

using namespace lm2m;

int main(int argc, char** argv)
{
    CLI::App app{"LwM2M device-management server"};
    tools::CommonFlags common;
    common.add_to(app);
    std::string udp_bind, http_bind, journal, secret_file, cors;
    auto* o_udp = app.add_option("--udp-bind", udp_bind, "UDP bind address (default 0.0.0.0:5684)");
    auto* o_http = app.add_option("--http-bind", http_bind, "HTTP bind address (default 0.0.0.0:8081)");
    auto* o_journal = app.add_option("--journal", journal, "chain journal written by the mining process");
    auto* o_secret = app.add_option("--secret-file", secret_file, "token secret shared with lm2m-mgmt");
    auto* o_cors = app.add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");
    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(common.log_level);
        tools::Settings s(common.config, "LM2M_DM_");
        s.set_if(o_udp, "udp_bind", udp_bind);
        s.set_if(o_http, "http_bind", http_bind);
        s.set_if(o_journal, "journal", journal);
        s.set_if(o_secret, "secret_file", secret_file);
        s.set_if(o_cors, "cors_origin", cors);

        auto journal_path = s.get_or("journal", "");
        if (journal_path.empty())
            throw std::invalid_argument("--journal is required");

        tools::block_termination_signals();
        auto chain = tools::open_chain(tools::load_chain_config(common.chain_config, common.profile), journal_path, true);
        chain->start_following(std::chrono::milliseconds(200));

        auth::TokenService tokens(auth::load_or_create_secret(s.get_or("secret_file", "lm2m-token.secret")));
        auth::AuthService auth(*chain, tokens);

        dm::DmServerOptions opts;
        opts.bind = net::SockAddr::parse(s.get_or("udp_bind", "0.0.0.0:5684"));
        dm::DmServer server(std::make_shared<contracts::LedgerClientDirectory>(*chain), opts);
        dm::RestApi api(server, tokens, &auth,
                        tools::parse_http_bind(s.get_or("http_bind", "0.0.0.0:8081"), s.get_or("cors_origin", "*")));
        server.start();
        api.start();
        spdlog::info("dm server on udp {}, api on http port {}", server.local_addr().to_string(), api.port());

        tools::wait_for_termination();
        api.stop();
        server.stop();
        chain->stop();
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
