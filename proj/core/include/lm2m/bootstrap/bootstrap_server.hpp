#pragma once

#include "lm2m/contracts/directory.hpp"
#include "lm2m/wire/endpoint.hpp"

#include <atomic>

namespace lm2m::bootstrap {

inline constexpr std::string_view kBootstrapPath = "/bs";

/// Provisioning payload returned to a client after a successful bootstrap.
struct BootstrapConfig {
    std::string server_uri;
    std::string server_psk_identity;
    Bytes server_psk_secret;

    static BootstrapConfig from(const contracts::ClientRecord& record);
    Bytes encode() const;
    /// Throws codec::DecodeError.
    static BootstrapConfig decode(ByteView data);

    bool operator==(const BootstrapConfig&) const = default;
};

struct BootstrapServerOptions {
    net::SockAddr bind = net::SockAddr::parse("0.0.0.0:5683");
    wire::EndpointOptions endpoint;
    /// Failed handshakes tolerated per peer address within a minute; 0 disables the limit.
    unsigned max_failures_per_minute = 0;
};

/// Authenticates clients with their bootstrap PSK from the directory and
/// hands out the device-management server URI and credentials.
class BootstrapServer {
public:
    BootstrapServer(std::shared_ptr<const contracts::ClientDirectory> directory, BootstrapServerOptions options);
    ~BootstrapServer();

    void start();
    void stop();
    net::SockAddr local_addr() const { return endpoint_.local_addr(); }
    wire::CoapEndpoint& endpoint() { return endpoint_; }

    std::uint64_t provisioned() const { return provisioned_; }
    std::uint64_t rejected() const { return rejected_; }

private:
    std::optional<Bytes> resolve(const net::SockAddr& peer, const std::string& identity);
    void record_failure(const net::SockAddr& peer);
    bool rate_limited(const net::SockAddr& peer);
    std::optional<wire::Message> handle(const wire::Incoming& in);

    std::shared_ptr<const contracts::ClientDirectory> directory_;
    BootstrapServerOptions options_;
    wire::CoapEndpoint endpoint_;
    std::atomic<std::uint64_t> provisioned_{0};
    std::atomic<std::uint64_t> rejected_{0};

    std::mutex failures_mu_;
    std::map<net::SockAddr, std::deque<std::chrono::steady_clock::time_point>> failures_;
};

} // namespace lm2m::bootstrap
