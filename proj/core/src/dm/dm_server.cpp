#include "lm2m/dm/dm_server.hpp"

#include "lm2m/util/config.hpp"
#include "lm2m/wire/errors.hpp"

#include <spdlog/spdlog.h>

#include <condition_variable>

namespace lm2m::dm {

using wire::Code;
using wire::make_response;
using wire::Message;

std::string_view to_string(DmErrc c)
{
    switch (c) {
    case DmErrc::NotRegistered: return "client not registered";
    case DmErrc::ClientTimeout: return "client did not respond";
    case DmErrc::ClientError: return "client returned an error";
    }
    return "dm error";
}

DmError::DmError(DmErrc code, std::optional<wire::Code> client_code)
    : std::runtime_error(client_code ? std::string(to_string(code)) + ": " + std::string(wire::to_string(*client_code))
                                     : std::string(to_string(code))),
      code_(code), client_code_(client_code)
{
}

DmServer::DmServer(std::shared_ptr<const contracts::ClientDirectory> directory, DmServerOptions options)
    : directory_(std::move(directory)), options_(options), endpoint_(options.bind, options.endpoint),
      table_(options.clock), hub_(options.subscriber_queue)
{
    endpoint_.set_psk_resolver([this](const net::SockAddr&, const std::string& identity) -> std::optional<Bytes> {
        auto record = directory_->find_by_server_identity(identity);
        if (!record)
            return std::nullopt;
        return record->server_psk_secret;
    });
    endpoint_.on_handshake([](const net::SockAddr& peer, const std::string& id, std::optional<wire::HandshakeErrc> err) {
        if (err)
            spdlog::info("dm: handshake from {} failed ({}) identity='{}'", peer.to_string(), wire::to_string(*err), id);
    });
    endpoint_.on_request([this](const wire::Incoming& in) { return handle(in); });
    endpoint_.on_notification([this](const wire::Incoming& in) { handle_notification(in); });
}

DmServer::~DmServer() { stop(); }

void DmServer::start()
{
    endpoint_.start();
    sweeper_ = std::jthread([this](std::stop_token st) { sweep_loop(st); });
    spdlog::info("dm: listening on {}", local_addr().to_string());
}

void DmServer::stop()
{
    if (sweeper_.joinable()) {
        sweeper_.request_stop();
        sweeper_.join();
    }
    endpoint_.stop();
}

void DmServer::sweep_loop(std::stop_token st)
{
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lk(m);
    while (!st.stop_requested()) {
        cv.wait_for(lk, st, options_.sweep_interval, [] { return false; });
        for (const auto& e : table_.sweep()) {
            hub_.drop_endpoint(e.endpoint);
            spdlog::info("dm: registration of '{}' ({}) expired", e.endpoint, e.reg_id);
        }
    }
}

std::optional<Message> DmServer::handle(const wire::Incoming& in)
{
    auto path = in.msg.path_only();
    if (path == kRegistrationPath) {
        if (in.msg.code != Code::Post)
            return make_response(in.msg, Code::MethodNotAllowed);
        return handle_register(in);
    }
    std::string prefix = std::string(kRegistrationPath) + "/";
    if (path.rfind(prefix, 0) == 0 && path.size() > prefix.size()) {
        std::string reg_id(path.substr(prefix.size()));
        if (in.msg.code == Code::Post)
            return handle_update(in, reg_id);
        if (in.msg.code == Code::Delete)
            return handle_deregister(in, reg_id);
        return make_response(in.msg, Code::MethodNotAllowed);
    }
    return make_response(in.msg, Code::NotFound);
}

Message DmServer::handle_register(const wire::Incoming& in)
{
    const auto& req = in.msg;
    auto ep = req.query("ep");
    if (!ep || ep->empty())
        return make_response(req, Code::BadRequest);

    // Second credential check: the session identity must belong to this endpoint.
    auto record = directory_->get(*ep);
    if (!record || record->server_psk_identity != in.identity) {
        spdlog::info("dm: registration of '{}' from {} refused (identity '{}')", *ep, in.peer.to_string(), in.identity);
        return make_response(req, Code::Unauthorized);
    }

    std::uint64_t lifetime = kDefaultLifetimeS;
    if (auto lt = req.query("lt")) {
        try {
            lifetime = parse_u64(*lt);
        } catch (const std::exception&) {
            return make_response(req, Code::BadRequest);
        }
        if (lifetime == 0)
            return make_response(req, Code::BadRequest);
    }
    auto links = parse_links(lm2m::to_string(ByteView(req.payload)));
    if (!links || links->empty())
        return make_response(req, Code::BadRequest);

    auto result = table_.register_client(*ep, in.peer, lifetime, std::move(*links), in.identity);
    if (result.replaced)
        hub_.drop_endpoint(*ep);
    spdlog::info("dm: registered '{}' from {} as {}", *ep, in.peer.to_string(), result.entry.reg_id);
    return make_response(req, Code::Created, to_bytes(result.entry.reg_id));
}

Message DmServer::handle_update(const wire::Incoming& in, const std::string& reg_id)
{
    const auto& req = in.msg;
    std::optional<std::uint64_t> lifetime;
    if (auto lt = req.query("lt")) {
        try {
            lifetime = parse_u64(*lt);
        } catch (const std::exception&) {
            return make_response(req, Code::BadRequest);
        }
        if (*lifetime == 0)
            return make_response(req, Code::BadRequest);
    }
    auto existing = table_.find(reg_id);
    if (!existing || existing->identity != in.identity)
        return make_response(req, Code::NotFound);
    if (!table_.update(reg_id, lifetime, in.peer))
        return make_response(req, Code::NotFound);
    return make_response(req, Code::Changed);
}

Message DmServer::handle_deregister(const wire::Incoming& in, const std::string& reg_id)
{
    auto existing = table_.find(reg_id);
    if (!existing || existing->identity != in.identity)
        return make_response(in.msg, Code::NotFound);
    auto removed = table_.deregister(reg_id);
    if (!removed)
        return make_response(in.msg, Code::NotFound);
    hub_.drop_endpoint(removed->endpoint);
    spdlog::info("dm: '{}' deregistered ({})", removed->endpoint, reg_id);
    return make_response(in.msg, Code::Deleted);
}

void DmServer::handle_notification(const wire::Incoming& in)
{
    const auto& msg = in.msg;
    if (msg.code != Code::Content)
        return;
    auto owner = hub_.owner(msg.token);
    if (!owner)
        return;
    auto reg = table_.find_endpoint(*owner);
    if (!reg || reg->remote_addr != in.peer || reg->identity != in.identity)
        return;
    try {
        hub_.deliver(msg.token, Notification{table_.now_ms(), wire::ResourceValue::decode(msg.payload)});
    } catch (const wire::WireError& e) {
        spdlog::debug("dm: bad notification payload from '{}': {}", *owner, e.what());
    }
}

Message DmServer::exchange(const std::string& endpoint, Message msg)
{
    auto reg = table_.find_endpoint(endpoint);
    if (!reg)
        throw DmError(DmErrc::NotRegistered);
    msg.type = wire::MessageType::Con;
    try {
        return endpoint_.request(reg->remote_addr, std::move(msg));
    } catch (const wire::EndpointError&) {
        throw DmError(DmErrc::ClientTimeout);
    }
}

wire::ResourceValue DmServer::read(const std::string& endpoint, const wire::Path& path)
{
    Message m;
    m.code = Code::Get;
    m.path = path.to_string();
    auto r = exchange(endpoint, std::move(m));
    if (r.code != Code::Content)
        throw DmError(DmErrc::ClientError, r.code);
    try {
        return wire::ResourceValue::decode(r.payload);
    } catch (const wire::WireError&) {
        throw DmError(DmErrc::ClientError, Code::BadRequest);
    }
}

void DmServer::write(const std::string& endpoint, const wire::Path& path, const wire::ResourceValue& value)
{
    Message m;
    m.code = Code::Put;
    m.path = path.to_string();
    m.payload = value.encode();
    auto r = exchange(endpoint, std::move(m));
    if (r.code != Code::Changed)
        throw DmError(DmErrc::ClientError, r.code);
}

void DmServer::execute(const std::string& endpoint, const wire::Path& path)
{
    Message m;
    m.code = Code::Post;
    m.path = path.to_string();
    auto r = exchange(endpoint, std::move(m));
    if (r.code != Code::Changed)
        throw DmError(DmErrc::ClientError, r.code);
}

std::shared_ptr<Subscription> DmServer::observe(const std::string& endpoint, const wire::Path& path,
                                                const std::string& subscriber)
{
    if (!table_.find_endpoint(endpoint))
        throw DmError(DmErrc::NotRegistered);
    auto p = path.to_string();
    auto sub = hub_.subscribe(endpoint, p, subscriber);
    if (!sub.start_upstream)
        return sub.subscription;

    Message m;
    m.code = Code::Get;
    m.path = p;
    m.token = sub.token;
    m.observe = wire::Observe::Register;
    Message r;
    try {
        r = exchange(endpoint, std::move(m));
    } catch (...) {
        hub_.fail_upstream(endpoint, p);
        throw;
    }
    if (r.code != Code::Content) {
        hub_.fail_upstream(endpoint, p);
        throw DmError(DmErrc::ClientError, r.code);
    }
    try {
        hub_.deliver(sub.token, Notification{table_.now_ms(), wire::ResourceValue::decode(r.payload)});
    } catch (const wire::WireError&) {
    }
    return sub.subscription;
}

bool DmServer::cancel_observe(const std::string& endpoint, const wire::Path& path, const std::string& subscriber)
{
    auto result = hub_.cancel(endpoint, path.to_string(), subscriber);
    if (!result.found)
        return false;
    if (result.stop_upstream) {
        Message m;
        m.code = Code::Get;
        m.path = path.to_string();
        m.token = *result.stop_upstream;
        m.observe = wire::Observe::Deregister;
        try {
            exchange(endpoint, std::move(m));
        } catch (const DmError& e) {
            spdlog::debug("dm: upstream cancel for '{}' {} failed: {}", endpoint, path.to_string(), e.what());
        }
    }
    return true;
}

} // namespace lm2m::dm
