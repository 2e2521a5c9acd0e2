#include "lm2m/util/net.hpp"

#include "lm2m/util/config.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

namespace lm2m::net {

namespace {

sockaddr_in to_native(const SockAddr& a)
{
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr.s_addr = htonl(a.ip);
    sa.sin_port = htons(a.port);
    return sa;
}

SockAddr from_native(const sockaddr_in& sa) { return {ntohl(sa.sin_addr.s_addr), ntohs(sa.sin_port)}; }

} // namespace

SockAddr SockAddr::from(std::string_view host, std::uint16_t port)
{
    std::string h = host == "localhost" ? std::string("127.0.0.1") : std::string(host);
    in_addr addr{};
    if (inet_pton(AF_INET, h.c_str(), &addr) != 1) throw std::invalid_argument("invalid IPv4 address: " + h);
    return {ntohl(addr.s_addr), port};
}

SockAddr SockAddr::parse(std::string_view host_port)
{
    auto colon = host_port.rfind(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("expected host:port");
    const auto port = parse_u64(host_port.substr(colon + 1));
    if (port > 65535) throw std::invalid_argument("port out of range");
    return from(host_port.substr(0, colon), static_cast<std::uint16_t>(port));
}

std::string SockAddr::to_string() const
{
    return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xff) + "." +
           std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff) + ":" + std::to_string(port);
}

Uri Uri::parse(std::string_view text)
{
    auto sep = text.find("://");
    if (sep == std::string_view::npos || sep == 0) throw std::invalid_argument("URI lacks scheme: " + std::string(text));
    Uri uri;
    uri.scheme = std::string(text.substr(0, sep));
    auto rest = text.substr(sep + 3);
    auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    if (slash != std::string_view::npos) uri.path = std::string(rest.substr(slash));
    auto colon = authority.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("URI lacks host:port: " + std::string(text));
    uri.host = std::string(authority.substr(0, colon));
    std::uint64_t port = 0;
    try {
        port = parse_u64(authority.substr(colon + 1));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("URI has bad port: " + std::string(text));
    }
    if (port == 0 || port > 65535) throw std::invalid_argument("URI port out of range: " + std::string(text));
    uri.port = static_cast<std::uint16_t>(port);
    return uri;
}

UdpSocket::UdpSocket(const SockAddr& bind_addr)
{
    fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) throw NetError(std::string("socket: ") + std::strerror(errno));
    int rcvbuf = 1 << 20;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof rcvbuf);
    auto sa = to_native(bind_addr);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw NetError("bind " + bind_addr.to_string() + ": " + std::strerror(err));
    }
}

UdpSocket::~UdpSocket()
{
    if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept
{
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

void UdpSocket::send_to(const SockAddr& to, ByteView data) const
{
    auto sa = to_native(to);
    const auto n = ::sendto(fd_, data.data(), data.size(), MSG_NOSIGNAL, reinterpret_cast<sockaddr*>(&sa), sizeof sa);
    if (n < 0) throw NetError(std::string("sendto ") + to.to_string() + ": " + std::strerror(errno));
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout) const
{
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc <= 0 || (pfd.revents & POLLIN) == 0) return std::nullopt;
    Datagram d;
    d.data.resize(65536);
    sockaddr_in sa{};
    socklen_t len = sizeof sa;
    const auto n = ::recvfrom(fd_, d.data.data(), d.data.size(), MSG_DONTWAIT, reinterpret_cast<sockaddr*>(&sa), &len);
    if (n < 0) return std::nullopt;
    d.data.resize(static_cast<std::size_t>(n));
    d.from = from_native(sa);
    return d;
}

SockAddr UdpSocket::local_addr() const
{
    sockaddr_in sa{};
    socklen_t len = sizeof sa;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len) != 0) {
        throw NetError(std::string("getsockname: ") + std::strerror(errno));
    }
    return from_native(sa);
}

void UdpSocket::shutdown()
{
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

} // namespace lm2m::net
