#pragma once

#include "lm2m/contracts/directory.hpp"
#include "lm2m/dm/observation.hpp"
#include "lm2m/dm/registration.hpp"
#include "lm2m/wire/endpoint.hpp"
#include "lm2m/wire/path.hpp"

#include <thread>

namespace lm2m::dm {

inline constexpr std::string_view kRegistrationPath = "/rd";

enum class DmErrc { NotRegistered, ClientTimeout, ClientError };
std::string_view to_string(DmErrc c);

class DmError : public std::runtime_error {
public:
    DmError(DmErrc code, std::optional<wire::Code> client_code = std::nullopt);
    DmErrc code() const { return code_; }
    /// The client's response code for ClientError.
    std::optional<wire::Code> client_code() const { return client_code_; }

private:
    DmErrc code_;
    std::optional<wire::Code> client_code_;
};

struct DmServerOptions {
    net::SockAddr bind = net::SockAddr::parse("0.0.0.0:5684");
    wire::EndpointOptions endpoint;
    std::chrono::milliseconds sweep_interval{1000};
    std::size_t subscriber_queue = 64;
    RegistrationTable::Clock clock;
};

/// LwM2M device-management server. Registration re-checks the client's
/// server credentials against the directory; device operations are proxied
/// over the client's session.
class DmServer {
public:
    DmServer(std::shared_ptr<const contracts::ClientDirectory> directory, DmServerOptions options);
    ~DmServer();

    void start();
    void stop();
    net::SockAddr local_addr() const { return endpoint_.local_addr(); }
    wire::CoapEndpoint& endpoint() { return endpoint_; }
    RegistrationTable& registrations() { return table_; }
    ObservationHub& observations() { return hub_; }

    /// Throws DmError.
    wire::ResourceValue read(const std::string& endpoint, const wire::Path& path);
    void write(const std::string& endpoint, const wire::Path& path, const wire::ResourceValue& value);
    void execute(const std::string& endpoint, const wire::Path& path);

    /// Subscribes; starts the upstream observation for the first subscriber.
    std::shared_ptr<Subscription> observe(const std::string& endpoint, const wire::Path& path,
                                          const std::string& subscriber);
    /// Returns false when no such subscription exists.
    bool cancel_observe(const std::string& endpoint, const wire::Path& path, const std::string& subscriber);

private:
    std::optional<wire::Message> handle(const wire::Incoming& in);
    wire::Message handle_register(const wire::Incoming& in);
    wire::Message handle_update(const wire::Incoming& in, const std::string& reg_id);
    wire::Message handle_deregister(const wire::Incoming& in, const std::string& reg_id);
    void handle_notification(const wire::Incoming& in);
    wire::Message exchange(const std::string& endpoint, wire::Message msg);
    void sweep_loop(std::stop_token st);

    std::shared_ptr<const contracts::ClientDirectory> directory_;
    DmServerOptions options_;
    wire::CoapEndpoint endpoint_;
    RegistrationTable table_;
    ObservationHub hub_;
    std::jthread sweeper_;
};

} // namespace lm2m::dm
