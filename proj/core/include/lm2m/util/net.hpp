#pragma once

#include "lm2m/util/bytes.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lm2m::net {

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// IPv4 socket address.
struct SockAddr {
    std::uint32_t ip = 0; // host byte order
    std::uint16_t port = 0;

    /// "a.b.c.d:port"; "localhost" is accepted as 127.0.0.1.
    static SockAddr parse(std::string_view host_port);
    static SockAddr from(std::string_view host, std::uint16_t port);

    std::string to_string() const;
    bool operator==(const SockAddr&) const = default;
    auto operator<=>(const SockAddr&) const = default;
};

struct SockAddrHash {
    std::size_t operator()(const SockAddr& a) const noexcept
    {
        return std::hash<std::uint64_t>{}((std::uint64_t{a.ip} << 16) | a.port);
    }
};

/// scheme://host:port[/path]
struct Uri {
    std::string scheme;
    std::string host;
    std::uint16_t port = 0;
    std::string path;

    /// Throws std::invalid_argument.
    static Uri parse(std::string_view text);
    SockAddr addr() const { return SockAddr::from(host, port); }
};

struct Datagram {
    SockAddr from;
    Bytes data;
};

class UdpSocket {
public:
    /// Binds immediately; port 0 picks an ephemeral port.
    explicit UdpSocket(const SockAddr& bind_addr);
    ~UdpSocket();
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&& other) noexcept;
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    void send_to(const SockAddr& to, ByteView data) const;
    /// Returns nullopt on timeout or after shutdown().
    std::optional<Datagram> receive(std::chrono::milliseconds timeout) const;
    SockAddr local_addr() const;
    /// Unblocks pending receive() calls.
    void shutdown();

private:
    int fd_ = -1;
};

} // namespace lm2m::net
