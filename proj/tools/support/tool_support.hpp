#pragma once

#include "lm2m/http/server.hpp"
#include "lm2m/ledger/ledger.hpp"
#include "lm2m/util/config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace lm2m::tools {

/// Settings from an optional key=value file, overlaid with environment
/// variables under `env_prefix`, overlaid with explicit command-line values.
class Settings {
public:
    Settings(const std::string& file, std::string_view env_prefix);

    /// Records a command-line value; wins over file and environment.
    void set_if(const CLI::Option* opt, std::string key, const std::string& value);

    std::optional<std::string> get(std::string_view key) const { return kv_.get(key); }
    std::string get_or(std::string_view key, std::string fallback) const { return kv_.get_or(key, std::move(fallback)); }
    std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback) const { return kv_.get_u64_or(key, fallback); }
    const KeyValueConfig& kv() const { return kv_; }

private:
    KeyValueConfig kv_;
};

/// Chain parameters: `chain_config` file (if any) plus LM2M_CHAIN_* variables,
/// then `profile` when given on the command line.
ledger::ChainConfig load_chain_config(const std::string& chain_file, const std::string& profile);

/// Opens the ledger with the three contracts. A follower tails `journal`
/// written by the mining process.
std::unique_ptr<ledger::Ledger> open_chain(const ledger::ChainConfig& config, const std::string& journal,
                                           bool follower);

/// "host:port" into HTTP options.
http::HttpOptions parse_http_bind(const std::string& bind, const std::string& cors_origin);

/// trace|debug|info|warn|error|off
void setup_logging(const std::string& level);

/// Blocks SIGINT and SIGTERM in the calling thread; call before starting
/// any threads so they inherit the mask.
void block_termination_signals();
/// Waits for SIGINT or SIGTERM; returns the signal number.
int wait_for_termination();

/// Adds --config, --chain-config, --profile, --log-level to `app`.
struct CommonFlags {
    std::string config;
    std::string chain_config;
    std::string profile;
    std::string log_level = "info";

    void add_to(CLI::App& app);
};

} // namespace lm2m::tools
