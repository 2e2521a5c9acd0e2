#include "lm2m/sim/device.hpp"

#include "lm2m/wire/errors.hpp"

#include <spdlog/spdlog.h>

namespace lm2m::sim {

using wire::Code;
using wire::make_response;
using wire::Path;
using wire::ResourceValue;
using Clock = std::chrono::steady_clock;

namespace {

const Path kLifetime = Path::resource_path(1, 0, 1);
const Path kUpdateTrigger = Path::resource_path(1, 0, 8);
const Path kReboot = Path::resource_path(3, 0, 4);
const Path kTemperature = Path::resource_path(3303, 0, 5700);

const std::vector<std::string> kLinks = {"/1/0", "/3/0", "/3303/0"};

} // namespace

std::string_view to_string(SimState s)
{
    switch (s) {
    case SimState::Stopped: return "stopped";
    case SimState::Bootstrapping: return "bootstrapping";
    case SimState::Registering: return "registering";
    case SimState::Registered: return "registered";
    }
    return "unknown";
}

SimDevice::SimDevice(SimConfig config)
    : config_(std::move(config)), bootstrap_addr_(net::Uri::parse(config_.bootstrap_uri).addr()),
      endpoint_(net::SockAddr::parse(config_.bind), config_.endpoint_options), lifetime_s_(config_.lifetime_s)
{
    if (config_.endpoint.empty())
        throw std::invalid_argument("sim: endpoint name required");
    if (config_.temp_period_s <= 0 || config_.lifetime_s == 0)
        throw std::invalid_argument("sim: period and lifetime must be positive");
    reset_objects();
    endpoint_.on_request([this](const wire::Incoming& in) { return handle(in); });
}

SimDevice::~SimDevice() { stop(); }

void SimDevice::reset_objects()
{
    objects_.clear();
    auto ro = [](ResourceValue v) { return Resource{std::move(v), true, false, false}; };
    auto exec = Resource{ResourceValue{}, false, false, true};
    objects_[Path::resource_path(1, 0, 0)] = ro(ResourceValue::integer(1));
    objects_[kLifetime] = Resource{ResourceValue::integer(static_cast<std::int64_t>(config_.lifetime_s)), true, true, false};
    objects_[kUpdateTrigger] = exec;
    objects_[Path::resource_path(3, 0, 0)] = ro(ResourceValue::text(std::string(kManufacturer)));
    objects_[Path::resource_path(3, 0, 1)] = ro(ResourceValue::text(std::string(kModel)));
    objects_[Path::resource_path(3, 0, 2)] = ro(ResourceValue::text(config_.endpoint));
    objects_[kReboot] = exec;
    objects_[kTemperature] = ro(ResourceValue::number(temperature(0.0, config_.temp_seed, config_.temp_noise)));
    objects_[Path::resource_path(3303, 0, 5701)] = ro(ResourceValue::text("Cel"));
    observations_.clear();
    ticks_ = 0;
    lifetime_s_ = config_.lifetime_s;
}

void SimDevice::start()
{
    if (lifecycle_.joinable())
        return;
    endpoint_.start();
    lifecycle_ = std::jthread([this](std::stop_token st) { lifecycle(st); });
    ticker_ = std::jthread([this](std::stop_token st) { ticker(st); });
}

void SimDevice::stop()
{
    if (!lifecycle_.joinable())
        return;
    {
        // Power-off courtesy: a non-confirmable deregistration.
        std::lock_guard lk(mutex_);
        if (state_ == SimState::Registered && reg_id_ && server_addr_) {
            wire::Message m;
            m.type = wire::MessageType::Non;
            m.code = Code::Delete;
            m.path = "/rd/" + *reg_id_;
            endpoint_.send(*server_addr_, m);
        }
    }
    lifecycle_.request_stop();
    ticker_.request_stop();
    endpoint_.stop();
    lifecycle_.join();
    ticker_.join();
    lifecycle_ = {};
    ticker_ = {};
    set_state(SimState::Stopped);
}

void SimDevice::set_state(SimState s)
{
    {
        std::lock_guard lk(mutex_);
        state_ = s;
    }
    cv_.notify_all();
}

SimState SimDevice::state() const
{
    std::lock_guard lk(mutex_);
    return state_;
}

std::optional<std::string> SimDevice::reg_id() const
{
    std::lock_guard lk(mutex_);
    return reg_id_;
}

std::optional<ResourceValue> SimDevice::value(const Path& path) const
{
    std::lock_guard lk(mutex_);
    auto it = objects_.find(path);
    if (it == objects_.end() || !it->second.readable)
        return std::nullopt;
    return it->second.value;
}

std::uint64_t SimDevice::counter(const std::uint64_t& field) const
{
    std::lock_guard lk(mutex_);
    return field;
}

std::uint64_t SimDevice::registrations() const { return counter(registrations_); }
std::uint64_t SimDevice::updates() const { return counter(updates_); }
std::uint64_t SimDevice::bootstrap_failures() const { return counter(bootstrap_failures_); }
std::uint64_t SimDevice::register_failures() const { return counter(register_failures_); }
std::uint64_t SimDevice::notifications_sent() const { return counter(notifications_); }

std::string SimDevice::last_error() const
{
    std::lock_guard lk(mutex_);
    return last_error_;
}

bool SimDevice::wait_registrations(std::uint64_t count, std::chrono::milliseconds timeout) const
{
    std::unique_lock lk(mutex_);
    return cv_.wait_for(lk, timeout, [&] { return registrations_ >= count && state_ == SimState::Registered; });
}

void SimDevice::reboot()
{
    {
        std::lock_guard lk(mutex_);
        reboot_pending_ = true;
    }
    cv_.notify_all();
}

void SimDevice::trigger_update()
{
    {
        std::lock_guard lk(mutex_);
        update_pending_ = true;
    }
    cv_.notify_all();
}

std::optional<wire::Message> SimDevice::handle(const wire::Incoming& in)
{
    const auto& req = in.msg;
    auto path = Path::try_parse(req.path_only());
    if (!path)
        return make_response(req, Code::NotFound);
    if (path->object == 0)
        return make_response(req, Code::Unauthorized); // Security object is never exposed

    std::unique_lock lk(mutex_);
    auto it = objects_.find(*path);
    if (it == objects_.end())
        return make_response(req, Code::NotFound);
    auto& res = it->second;

    switch (req.code) {
    case Code::Get:
        if (!res.readable)
            return make_response(req, Code::MethodNotAllowed);
        if (req.observe == wire::Observe::Register)
            observations_[req.token] = *path;
        else if (req.observe == wire::Observe::Deregister)
            observations_.erase(req.token);
        return make_response(req, Code::Content, res.value.encode());

    case Code::Put: {
        if (!res.writable)
            return make_response(req, Code::MethodNotAllowed);
        ResourceValue v;
        try {
            v = ResourceValue::decode(req.payload);
        } catch (const wire::WireError&) {
            return make_response(req, Code::BadRequest);
        }
        if (v.kind() != res.value.kind())
            return make_response(req, Code::BadRequest);
        if (*path == kLifetime) {
            if (v.as_integer() <= 0)
                return make_response(req, Code::BadRequest);
            lifetime_s_ = static_cast<std::uint64_t>(v.as_integer());
            lifetime_changed_ = true;
            update_pending_ = true;
        }
        res.value = std::move(v);
        lk.unlock();
        cv_.notify_all();
        return make_response(req, Code::Changed);
    }

    case Code::Post:
        if (!res.executable)
            return make_response(req, Code::MethodNotAllowed);
        if (*path == kReboot)
            reboot_pending_ = true;
        else if (*path == kUpdateTrigger)
            update_pending_ = true;
        lk.unlock();
        cv_.notify_all();
        return make_response(req, Code::Changed);

    default:
        return make_response(req, Code::MethodNotAllowed);
    }
}

bool SimDevice::wait_event(std::stop_token st, Clock::time_point deadline)
{
    std::unique_lock lk(mutex_);
    cv_.wait_until(lk, st, deadline, [&] { return reboot_pending_ || update_pending_; });
    return !st.stop_requested();
}

void SimDevice::lifecycle(std::stop_token st)
{
    auto backoff = config_.retry_base;
    auto fail = [&](std::uint64_t& counter, const std::exception& e) {
        {
            std::lock_guard lk(mutex_);
            ++counter;
            last_error_ = e.what();
        }
        spdlog::debug("sim {}: {}", config_.endpoint, e.what());
        wait_event(st, Clock::now() + backoff);
        backoff = std::min(backoff * 2, config_.retry_cap);
    };

    while (!st.stop_requested()) {
        set_state(SimState::Bootstrapping);
        bootstrap::BootstrapConfig cfg;
        net::SockAddr server;
        try {
            cfg = bootstrap(endpoint_, bootstrap_addr_, config_.psk_identity, config_.psk_secret, config_.endpoint);
            server = net::Uri::parse(cfg.server_uri).addr();
        } catch (const std::exception& e) {
            fail(bootstrap_failures_, e);
            continue;
        }

        set_state(SimState::Registering);
        std::string reg;
        std::uint64_t lifetime;
        {
            std::lock_guard lk(mutex_);
            security_ = cfg;
            server_addr_ = server;
            lifetime = lifetime_s_;
        }
        try {
            reg = register_client(endpoint_, server, cfg, config_.endpoint, lifetime, kLinks);
        } catch (const std::exception& e) {
            fail(register_failures_, e);
            continue;
        }
        backoff = config_.retry_base;
        {
            std::lock_guard lk(mutex_);
            reg_id_ = reg;
            ++registrations_;
            state_ = SimState::Registered;
            update_pending_ = false;
            lifetime_changed_ = false;
        }
        cv_.notify_all();
        spdlog::debug("sim {}: registered as {}", config_.endpoint, reg);

        auto last_update = Clock::now();
        while (!st.stop_requested()) {
            auto half = std::chrono::milliseconds(lifetime * 500);
            if (!wait_event(st, last_update + half))
                return;
            bool reboot_now, lifetime_changed;
            {
                std::lock_guard lk(mutex_);
                reboot_now = reboot_pending_;
                lifetime_changed = lifetime_changed_;
                reboot_pending_ = update_pending_ = lifetime_changed_ = false;
                lifetime = lifetime_s_;
            }
            if (reboot_now) {
                spdlog::debug("sim {}: rebooting", config_.endpoint);
                deregister(endpoint_, server, reg);
                endpoint_.drop_all_sessions();
                std::lock_guard lk(mutex_);
                reset_objects();
                reg_id_.reset();
                security_.reset();
                server_addr_.reset();
                break;
            }
            try {
                update_registration(endpoint_, server, reg,
                                    lifetime_changed ? std::optional<std::uint64_t>(lifetime) : std::nullopt);
                last_update = Clock::now();
                std::lock_guard lk(mutex_);
                ++updates_;
            } catch (const std::exception& e) {
                std::lock_guard lk(mutex_);
                last_error_ = e.what();
                reg_id_.reset();
                endpoint_.drop_all_sessions();
                break;
            }
        }
    }
}

void SimDevice::ticker(std::stop_token st)
{
    const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config_.temp_period_s));
    auto next = Clock::now() + period;
    std::mutex m;
    std::condition_variable_any sleeper;
    while (!st.stop_requested()) {
        {
            std::unique_lock lk(m);
            sleeper.wait_until(lk, st, next, [] { return false; });
        }
        if (st.stop_requested())
            return;
        next += period;

        std::vector<std::pair<Bytes, ResourceValue>> out;
        std::optional<net::SockAddr> server;
        {
            std::lock_guard lk(mutex_);
            ++ticks_;
            objects_[kTemperature].value = ResourceValue::number(
                temperature(static_cast<double>(ticks_) * config_.temp_period_s, config_.temp_seed, config_.temp_noise));
            if (state_ == SimState::Registered && server_addr_) {
                server = server_addr_;
                for (const auto& [token, path] : observations_)
                    out.emplace_back(token, objects_[path].value);
                notifications_ += out.size();
            }
        }
        for (auto& [token, v] : out) {
            wire::Message n;
            n.type = wire::MessageType::Non;
            n.code = Code::Content;
            n.token = token;
            n.observe = wire::Observe::Register;
            n.payload = v.encode();
            endpoint_.send(*server, n);
        }
    }
}

} // namespace lm2m::sim
