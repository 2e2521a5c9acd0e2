#include "tool_support.hpp"

#include "lm2m/contracts/api.hpp"

#include <spdlog/spdlog.h>

#include <csignal>

namespace lm2m::tools {

Settings::Settings(const std::string& file, std::string_view env_prefix)
{
    if (!file.empty())
        kv_ = KeyValueConfig::load(file);
    kv_.overlay_env(env_prefix);
}

void Settings::set_if(const CLI::Option* opt, std::string key, const std::string& value)
{
    if (opt->count() > 0)
        kv_.set(std::move(key), value);
}

ledger::ChainConfig load_chain_config(const std::string& chain_file, const std::string& profile)
{
    KeyValueConfig kv;
    if (!chain_file.empty())
        kv = KeyValueConfig::load(chain_file);
    kv.overlay_env("LM2M_CHAIN_");
    if (!profile.empty())
        kv.set("profile", profile);
    auto cfg = ledger::ChainConfig::from(kv);
    cfg.validate();
    return cfg;
}

std::unique_ptr<ledger::Ledger> open_chain(const ledger::ChainConfig& config, const std::string& journal, bool follower)
{
    ledger::Ledger::Options opts{config, std::nullopt, follower, {}};
    if (!journal.empty())
        opts.journal = std::filesystem::path(journal);
    return contracts::open_ledger(std::move(opts));
}

http::HttpOptions parse_http_bind(const std::string& bind, const std::string& cors_origin)
{
    auto colon = bind.rfind(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("expected host:port, got '" + bind + "'");
    http::HttpOptions o;
    o.host = bind.substr(0, colon);
    auto port = parse_u64(std::string_view(bind).substr(colon + 1));
    if (port > 65535)
        throw std::invalid_argument("port out of range in '" + bind + "'");
    o.port = static_cast<std::uint16_t>(port);
    o.cors_origin = cors_origin;
    return o;
}

void setup_logging(const std::string& level)
{
    auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && level != "off")
        throw std::invalid_argument("unknown log level '" + level + "'");
    spdlog::set_level(lvl);
    spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
}

namespace {
sigset_t termination_set()
{
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    return set;
}
} // namespace

void block_termination_signals()
{
    auto set = termination_set();
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

int wait_for_termination()
{
    auto set = termination_set();
    int sig = 0;
    sigwait(&set, &sig);
    return sig;
}

void CommonFlags::add_to(CLI::App& app)
{
    app.add_option("--config", config, "key=value settings file");
    app.add_option("--chain-config", chain_config, "key=value chain parameters (LM2M_CHAIN_* overrides)");
    app.add_option("--profile", profile, "chain profile")->check(CLI::IsMember({"desk", "paper-emulation"}));
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");
}

} // namespace lm2m::tools
