#pragma once

#include "lm2m/sim/device.hpp"
#include "lm2m/sim/psk_file.hpp"

#include <memory>

namespace lm2m::sim {

class FleetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "<prefix>-0001" style names, 1-based.
std::string fleet_endpoint_name(std::string_view prefix, std::size_t index);

struct FleetConfig {
    std::size_t n = 1;
    std::string prefix = "sim";
    std::string bootstrap_uri;
    /// Credentials per endpoint name; every fleet member must be present.
    std::vector<PskEntry> psks;
    /// Template for every device; endpoint, URI and credentials are overwritten.
    SimConfig device;
    /// Seeds are `device.temp_seed + index` so that devices differ.
    bool distinct_seeds = true;
};

/// In-process fleet of simulated devices, one socket and thread set each.
class Fleet {
public:
    /// Throws std::invalid_argument for n == 0 or missing credentials, and
    /// FleetError when sockets cannot be bound.
    explicit Fleet(FleetConfig config);
    ~Fleet();

    void start();
    void stop();

    std::size_t size() const { return devices_.size(); }
    SimDevice& at(std::size_t i) { return *devices_.at(i); }
    SimDevice* find(std::string_view endpoint);
    /// Number of devices currently registered.
    std::size_t registered() const;
    bool wait_all_registered(std::chrono::milliseconds timeout) const;

private:
    std::vector<std::unique_ptr<SimDevice>> devices_;
};

} // namespace lm2m::sim
