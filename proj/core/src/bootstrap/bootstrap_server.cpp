#include "lm2m/bootstrap/bootstrap_server.hpp"

#include <spdlog/spdlog.h>

namespace lm2m::bootstrap {

using wire::Code;
using wire::make_response;

BootstrapConfig BootstrapConfig::from(const contracts::ClientRecord& r)
{
    return BootstrapConfig{r.server_uri, r.server_psk_identity, r.server_psk_secret};
}

Bytes BootstrapConfig::encode() const
{
    return codec::Writer().str(server_uri).str(server_psk_identity).bytes(server_psk_secret).take();
}

BootstrapConfig BootstrapConfig::decode(ByteView data)
{
    codec::Reader r(data);
    BootstrapConfig c;
    c.server_uri = r.str();
    c.server_psk_identity = r.str();
    c.server_psk_secret = r.bytes();
    r.expect_end();
    return c;
}

BootstrapServer::BootstrapServer(std::shared_ptr<const contracts::ClientDirectory> directory,
                                 BootstrapServerOptions options)
    : directory_(std::move(directory)), options_(options), endpoint_(options.bind, options.endpoint)
{
    endpoint_.set_psk_resolver([this](const net::SockAddr& peer, const std::string& id) { return resolve(peer, id); });
    endpoint_.on_handshake([this](const net::SockAddr& peer, const std::string& id, std::optional<wire::HandshakeErrc> err) {
        if (!err)
            return;
        ++rejected_;
        record_failure(peer);
        spdlog::info("bootstrap: handshake from {} failed ({}) identity='{}'", peer.to_string(), wire::to_string(*err), id);
    });
    endpoint_.on_request([this](const wire::Incoming& in) { return handle(in); });
}

BootstrapServer::~BootstrapServer() { stop(); }

void BootstrapServer::start()
{
    endpoint_.start();
    spdlog::info("bootstrap: listening on {}", local_addr().to_string());
}

void BootstrapServer::stop() { endpoint_.stop(); }

std::optional<Bytes> BootstrapServer::resolve(const net::SockAddr& peer, const std::string& identity)
{
    if (rate_limited(peer))
        return std::nullopt;
    auto record = directory_->find_by_bootstrap_identity(identity);
    if (!record)
        return std::nullopt;
    return record->bootstrap_psk_secret;
}

void BootstrapServer::record_failure(const net::SockAddr& peer)
{
    if (options_.max_failures_per_minute == 0)
        return;
    std::lock_guard lk(failures_mu_);
    failures_[peer].push_back(std::chrono::steady_clock::now());
}

bool BootstrapServer::rate_limited(const net::SockAddr& peer)
{
    if (options_.max_failures_per_minute == 0)
        return false;
    std::lock_guard lk(failures_mu_);
    auto it = failures_.find(peer);
    if (it == failures_.end())
        return false;
    auto cutoff = std::chrono::steady_clock::now() - std::chrono::minutes(1);
    auto& q = it->second;
    while (!q.empty() && q.front() < cutoff)
        q.pop_front();
    if (q.empty()) {
        failures_.erase(it);
        return false;
    }
    return q.size() >= options_.max_failures_per_minute;
}

std::optional<wire::Message> BootstrapServer::handle(const wire::Incoming& in)
{
    const auto& req = in.msg;
    if (req.path_only() != kBootstrapPath)
        return make_response(req, Code::NotFound);
    if (req.code != Code::Post)
        return make_response(req, Code::MethodNotAllowed);
    auto ep = req.query("ep");
    if (!ep || ep->empty())
        return make_response(req, Code::BadRequest);

    // Fresh lookup: the record may have changed since the handshake.
    auto record = directory_->get(*ep);
    if (!record || record->bootstrap_psk_identity != in.identity) {
        ++rejected_;
        spdlog::info("bootstrap: {} requested ep='{}' with identity '{}', refused", in.peer.to_string(), *ep,
                     in.identity);
        return make_response(req, Code::Unauthorized);
    }
    ++provisioned_;
    spdlog::info("bootstrap: provisioned '{}' at {} with server {}", *ep, in.peer.to_string(), record->server_uri);
    return make_response(req, Code::Changed, BootstrapConfig::from(*record).encode());
}

} // namespace lm2m::bootstrap
