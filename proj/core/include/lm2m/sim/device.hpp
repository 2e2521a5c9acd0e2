#pragma once

#include "lm2m/sim/client_flow.hpp"
#include "lm2m/sim/temperature.hpp"
#include "lm2m/wire/path.hpp"
#include "lm2m/wire/resource_value.hpp"

#include <condition_variable>
#include <thread>

namespace lm2m::sim {

inline constexpr std::string_view kManufacturer = "ERTIS-SIM";
inline constexpr std::string_view kModel = "SIM-1";

struct SimConfig {
    std::string endpoint;
    /// coap://host:port of the bootstrap server.
    std::string bootstrap_uri;
    std::string psk_identity;
    Bytes psk_secret;

    double temp_period_s = 2.0;
    std::uint64_t temp_seed = 1;
    double temp_noise = kDefaultNoise;
    std::uint64_t lifetime_s = 60;

    std::string bind = "0.0.0.0:0";
    wire::EndpointOptions endpoint_options{std::chrono::milliseconds(2000), 4, 1};
    std::chrono::milliseconds retry_base{1000};
    std::chrono::milliseconds retry_cap{60'000};
};

enum class SimState { Stopped, Bootstrapping, Registering, Registered };
std::string_view to_string(SimState s);

/// One simulated LwM2M client with Security(0), Server(1), Device(3) and
/// Temperature(3303) objects.
///
/// Lifecycle: bootstrap, register, update at lifetime/2. Executing /3/0/4
/// deregisters, resets the objects and starts over; /1/0/8 sends an update.
/// Observed resources are notified once per temperature period.
class SimDevice {
public:
    explicit SimDevice(SimConfig config);
    ~SimDevice();
    SimDevice(const SimDevice&) = delete;
    SimDevice& operator=(const SimDevice&) = delete;

    void start();
    void stop();

    /// Must be called before start().
    void set_transcript_hook(wire::CoapEndpoint::TranscriptHook hook) { endpoint_.set_transcript_hook(std::move(hook)); }

    const SimConfig& config() const { return config_; }
    net::SockAddr local_addr() const { return endpoint_.local_addr(); }

    SimState state() const;
    std::optional<std::string> reg_id() const;
    /// Current value of a readable resource, as the device holds it.
    std::optional<wire::ResourceValue> value(const wire::Path& path) const;

    std::uint64_t registrations() const;
    std::uint64_t updates() const;
    std::uint64_t bootstrap_failures() const;
    std::uint64_t register_failures() const;
    std::uint64_t notifications_sent() const;
    std::string last_error() const;

    /// Waits until the device has registered at least `count` times in total.
    bool wait_registrations(std::uint64_t count, std::chrono::milliseconds timeout) const;
    bool wait_registered(std::chrono::milliseconds timeout) const { return wait_registrations(1, timeout); }

    /// Same effect as executing /3/0/4 or /1/0/8.
    void reboot();
    void trigger_update();

private:
    struct Resource {
        wire::ResourceValue value;
        bool readable = true;
        bool writable = false;
        bool executable = false;
    };

    void reset_objects();
    std::optional<wire::Message> handle(const wire::Incoming& in);
    void lifecycle(std::stop_token st);
    void ticker(std::stop_token st);
    /// Sleeps until `deadline`, stop, or a pending event. Returns false on stop.
    bool wait_event(std::stop_token st, std::chrono::steady_clock::time_point deadline);
    void set_state(SimState s);
    std::uint64_t counter(const std::uint64_t& field) const;

    SimConfig config_;
    net::SockAddr bootstrap_addr_;
    wire::CoapEndpoint endpoint_;

    mutable std::mutex mutex_;
    mutable std::condition_variable_any cv_;
    SimState state_ = SimState::Stopped;
    std::map<wire::Path, Resource> objects_;
    std::map<Bytes, wire::Path> observations_;
    std::optional<bootstrap::BootstrapConfig> security_;
    std::optional<net::SockAddr> server_addr_;
    std::optional<std::string> reg_id_;
    std::uint64_t lifetime_s_;
    std::uint64_t ticks_ = 0;
    bool reboot_pending_ = false;
    bool update_pending_ = false;
    bool lifetime_changed_ = false;
    std::uint64_t registrations_ = 0;
    std::uint64_t updates_ = 0;
    std::uint64_t bootstrap_failures_ = 0;
    std::uint64_t register_failures_ = 0;
    std::uint64_t notifications_ = 0;
    std::string last_error_;

    std::jthread lifecycle_;
    std::jthread ticker_;
};

} // namespace lm2m::sim
