#include "lm2m/sim/fleet.hpp"

#include <cstdio>
#include <thread>

namespace lm2m::sim {

std::string fleet_endpoint_name(std::string_view prefix, std::size_t index)
{
    char digits[24];
    std::snprintf(digits, sizeof digits, "%04zu", index);
    return std::string(prefix) + "-" + digits;
}

Fleet::Fleet(FleetConfig config)
{
    if (config.n == 0)
        throw std::invalid_argument("fleet size must be at least 1");
    devices_.reserve(config.n);
    for (std::size_t i = 1; i <= config.n; ++i) {
        auto name = fleet_endpoint_name(config.prefix, i);
        const auto* psk = find_psk(config.psks, name);
        if (!psk)
            throw std::invalid_argument("no credentials for " + name);
        SimConfig c = config.device;
        c.endpoint = name;
        c.bootstrap_uri = config.bootstrap_uri;
        c.psk_identity = psk->identity;
        c.psk_secret = psk->secret;
        if (config.distinct_seeds)
            c.temp_seed += i;
        try {
            devices_.push_back(std::make_unique<SimDevice>(std::move(c)));
        } catch (const net::NetError& e) {
            throw FleetError("address space exhausted at " + name + ": " + e.what());
        }
    }
}

Fleet::~Fleet() { stop(); }

void Fleet::start()
{
    for (auto& d : devices_)
        d->start();
}

void Fleet::stop()
{
    for (auto& d : devices_)
        d->stop();
}

SimDevice* Fleet::find(std::string_view endpoint)
{
    for (auto& d : devices_)
        if (d->config().endpoint == endpoint)
            return d.get();
    return nullptr;
}

std::size_t Fleet::registered() const
{
    std::size_t n = 0;
    for (const auto& d : devices_)
        n += d->state() == SimState::Registered;
    return n;
}

bool Fleet::wait_all_registered(std::chrono::milliseconds timeout) const
{
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (const auto& d : devices_) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0 || !d->wait_registered(left))
            return false;
    }
    return true;
}

} // namespace lm2m::sim
