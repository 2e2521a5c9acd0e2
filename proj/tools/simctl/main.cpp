// simctl: run a fleet of simulated LwM2M clients and control it over a local UDP port.

#include "support/tool_support.hpp"

#include "lm2m/sim/fleet.hpp"
#include "lm2m/util/crypto.hpp"
#include "lm2m/util/net.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <thread>
#include <unistd.h>

using namespace lm2m;

namespace {

constexpr auto kDefaultControl = "127.0.0.1:5690";

std::string handle_command(sim::Fleet& fleet, const std::string& line, bool& stop)
{
    std::istringstream in(line);
    std::string cmd, arg;
    in >> cmd >> arg;
    if (cmd == "stop") {
        stop = true;
        return "ok stopping";
    }
    if (cmd == "exec-reboot") {
        auto* dev = fleet.find(arg);
        if (!dev)
            return "error unknown endpoint " + arg;
        dev->reboot();
        return "ok " + arg + " rebooting";
    }
    if (cmd == "status") {
        std::ostringstream out;
        out << "ok " << fleet.registered() << "/" << fleet.size() << " registered";
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            auto& d = fleet.at(i);
            out << "\n" << d.config().endpoint << " " << sim::to_string(d.state()) << " " << d.reg_id().value_or("-");
        }
        return out.str();
    }
    return "error unknown command '" + cmd + "'";
}

int run_spawn(const sim::FleetConfig& cfg, const std::string& control)
{
    tools::block_termination_signals();
    net::UdpSocket ctl(net::SockAddr::parse(control));
    sim::Fleet fleet(cfg);
    fleet.start();
    spdlog::info("spawned {} devices; control on udp {}", fleet.size(), ctl.local_addr().to_string());

    std::atomic<bool> terminated{false};
    std::jthread signals([&] {
        tools::wait_for_termination();
        terminated = true;
        ctl.shutdown();
    });

    std::size_t reported = 0;
    bool stop = false;
    while (!stop && !terminated) {
        if (auto dg = ctl.receive(std::chrono::milliseconds(500))) {
            auto reply = handle_command(fleet, std::string(dg->data.begin(), dg->data.end()), stop);
            ctl.send_to(dg->from, as_view(reply));
        }
        auto now = fleet.registered();
        if (now != reported) {
            spdlog::info("{}/{} registered", now, fleet.size());
            reported = now;
        }
    }
    fleet.stop();
    if (!terminated)
        kill(getpid(), SIGTERM); // release the signal thread
    return 0;
}

int send_command(const std::string& control, const std::string& command)
{
    net::UdpSocket sock(net::SockAddr::parse("127.0.0.1:0"));
    sock.send_to(net::SockAddr::parse(control), as_view(command));
    auto reply = sock.receive(std::chrono::seconds(5));
    if (!reply) {
        std::cerr << "no reply from " << control << "\n";
        return 2;
    }
    std::string text(reply->data.begin(), reply->data.end());
    std::cout << text << "\n";
    return text.rfind("ok", 0) == 0 ? 0 : 1;
}

/// Creates credentials for n devices, submits them to the management
/// service, and writes the bootstrap PSK file.
int run_provision(std::size_t n, const std::string& prefix, const std::string& mgmt_url, const std::string& token,
                  const std::string& bootstrap_uri, const std::string& server_uri, const std::string& out)
{
    httplib::Client client(mgmt_url);
    client.set_bearer_token_auth(token);
    std::vector<sim::PskEntry> entries;
    for (std::size_t i = 1; i <= n; ++i) {
        auto ep = sim::fleet_endpoint_name(prefix, i);
        auto bs_secret = crypto::random_bytes(32);
        nlohmann::json body{{"endpoint", ep},
                            {"bootstrap_uri", bootstrap_uri},
                            {"server_uri", server_uri},
                            {"bootstrap_psk_identity", ep + "-bs"},
                            {"bootstrap_psk_secret", to_hex(bs_secret)},
                            {"server_psk_identity", ep + "-dm"},
                            {"server_psk_secret", to_hex(crypto::random_bytes(32))}};
        auto res = client.Post("/mgmt/devices", body.dump(), "application/json");
        if (!res || res->status != 202) {
            std::cerr << ep << ": " << (res ? std::to_string(res->status) + " " + res->body : httplib::to_string(res.error()))
                      << "\n";
            return 1;
        }
        std::cout << ep << " tx " << nlohmann::json::parse(res->body).value("tx_id", "") << "\n";
        entries.push_back({ep, ep + "-bs", std::move(bs_secret)});
    }
    std::ofstream f(out, std::ios::trunc);
    f << sim::format_psk_file(entries);
    if (!f) {
        std::cerr << "cannot write " << out << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulated LwM2M client fleet"};
    app.require_subcommand(1);
    std::string log_level = "info", control = kDefaultControl;
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");
    app.add_option("--control", control, "control address of the running fleet");

    sim::FleetConfig cfg;
    std::string psk_file;
    double period = cfg.device.temp_period_s;
    double noise = cfg.device.temp_noise;
    auto* spawn = app.add_subcommand("spawn", "start a fleet and serve control commands until stopped");
    spawn->add_option("--n", cfg.n, "number of devices")->required()->check(CLI::PositiveNumber);
    spawn->add_option("--prefix", cfg.prefix, "endpoint name prefix");
    spawn->add_option("--bootstrap-uri", cfg.bootstrap_uri, "coap://host:port")->required();
    spawn->add_option("--psk-file", psk_file, "lines of endpoint,identity,hex-secret")->required();
    spawn->add_option("--period", period, "temperature period in seconds");
    spawn->add_option("--noise", noise, "temperature noise amplitude");
    spawn->add_option("--seed", cfg.device.temp_seed, "base temperature seed");
    spawn->add_option("--lifetime", cfg.device.lifetime_s, "registration lifetime in seconds");

    std::string endpoint;
    auto* reboot = app.add_subcommand("exec-reboot", "execute /3/0/4 on one device of the running fleet");
    reboot->add_option("endpoint", endpoint)->required();
    auto* stop = app.add_subcommand("stop", "stop the running fleet");
    auto* status = app.add_subcommand("status", "print the state of every device");

    std::size_t pn = 1;
    std::string prefix = "sim", mgmt_url = "http://127.0.0.1:8080", token, server_uri, out = "psk.csv";
    std::string bs_uri;
    auto* provision = app.add_subcommand("provision", "register fresh device credentials via the management service");
    provision->add_option("--n", pn, "number of devices")->required()->check(CLI::PositiveNumber);
    provision->add_option("--prefix", prefix, "endpoint name prefix");
    provision->add_option("--mgmt-url", mgmt_url, "management service base URL");
    provision->add_option("--token", token, "Admin bearer token")->required()->envname("LM2M_TOKEN");
    provision->add_option("--bootstrap-uri", bs_uri, "coap://host:port of the bootstrap server")->required();
    provision->add_option("--server-uri", server_uri, "coap://host:port of the DM server")->required();
    provision->add_option("--out", out, "PSK file to write");

    CLI11_PARSE(app, argc, argv);

    try {
        tools::setup_logging(log_level);
        if (*spawn) {
            cfg.psks = sim::load_psk_file(psk_file);
            cfg.device.temp_period_s = period;
            cfg.device.temp_noise = noise;
            return run_spawn(cfg, control);
        }
        if (*reboot)
            return send_command(control, "exec-reboot " + endpoint);
        if (*stop)
            return send_command(control, "stop");
        if (*status)
            return send_command(control, "status");
        if (*provision)
            return run_provision(pn, prefix, mgmt_url, token, bs_uri, server_uri, out);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
