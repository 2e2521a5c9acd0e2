#include "lm2m/wire/endpoint.hpp"

#include "lm2m/util/crypto.hpp"
#include "lm2m/wire/errors.hpp"

#include <spdlog/spdlog.h>

namespace lm2m::wire {

using Clock = std::chrono::steady_clock;

std::string_view to_string(EndpointErrc c)
{
    switch (c) {
    case EndpointErrc::Timeout: return "request timed out";
    case EndpointErrc::Reset: return "request reset by peer";
    case EndpointErrc::Stopped: return "endpoint stopped";
    }
    return "endpoint error";
}

namespace {

std::uint16_t random_mid()
{
    auto r = crypto::random_bytes(2);
    return static_cast<std::uint16_t>((r[0] << 8) | r[1]);
}

Message handshake_reply(const Message& req, Code code, std::string_view path, Bytes payload = {})
{
    auto r = make_response(req, code, std::move(payload));
    r.path = std::string(path);
    return r;
}

} // namespace

CoapEndpoint::CoapEndpoint(const net::SockAddr& bind, EndpointOptions opts)
    : opts_(opts), socket_(bind), next_mid_(random_mid())
{
    if (opts_.workers == 0)
        opts_.workers = 1;
}

CoapEndpoint::~CoapEndpoint() { stop(); }

void CoapEndpoint::start()
{
    if (running_.exchange(true))
        return;
    rx_thread_ = std::thread([this] { receive_loop(); });
    for (unsigned i = 0; i < opts_.workers; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

void CoapEndpoint::stop()
{
    if (!running_.exchange(false))
        return;
    {
        std::lock_guard lk(pending_mu_);
    }
    pending_cv_.notify_all();
    {
        std::lock_guard lk(task_mu_);
    }
    task_cv_.notify_all();
    socket_.shutdown();
    if (rx_thread_.joinable())
        rx_thread_.join();
    for (auto& w : workers_)
        if (w.joinable())
            w.join();
    workers_.clear();
}

void CoapEndpoint::receive_loop()
{
    while (running_) {
        std::optional<net::Datagram> dg;
        try {
            dg = socket_.receive(std::chrono::milliseconds(50));
        } catch (const net::NetError& e) {
            if (running_)
                spdlog::warn("coap: receive failed: {}", e.what());
            continue;
        }
        if (!dg)
            continue;
        if (transcript_)
            transcript_(Direction::In, dg->from, dg->data);
        process(std::move(*dg));
    }
}

void CoapEndpoint::worker_loop()
{
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lk(task_mu_);
            task_cv_.wait(lk, [&] { return !tasks_.empty() || !running_; });
            if (!running_)
                return;
            task = std::move(tasks_.front());
            tasks_.pop_front();
        }
        try {
            task();
        } catch (const std::exception& e) {
            spdlog::warn("coap: handler failed: {}", e.what());
        }
    }
}

void CoapEndpoint::post(std::function<void()> task)
{
    {
        std::lock_guard lk(task_mu_);
        tasks_.push_back(std::move(task));
    }
    task_cv_.notify_one();
}

void CoapEndpoint::process(net::Datagram dg)
{
    std::optional<PskSession> sess = session(dg.from);
    Incoming in;
    in.peer = dg.from;
    bool authenticated = false;
    if (sess) {
        try {
            in.msg = decode(open(dg.data, *sess));
            in.identity = sess->peer_identity;
            authenticated = true;
        } catch (const WireError&) {
        }
    }
    if (!authenticated) {
        try {
            in.msg = decode(dg.data);
        } catch (const WireError& e) {
            spdlog::debug("coap: dropping malformed datagram from {}: {}", dg.from.to_string(), e.what());
            return;
        }
        if (in.msg.type != MessageType::Rst && !is_handshake_path(in.msg.path_only())) {
            if (in.msg.type == MessageType::Con && is_request(in.msg.code)) {
                Message rst;
                rst.type = MessageType::Rst;
                rst.code = Code::Empty;
                rst.message_id = in.msg.message_id;
                send_message(dg.from, rst);
            }
            spdlog::debug("coap: dropping unauthenticated message from {}", dg.from.to_string());
            return;
        }
    }

    const auto& msg = in.msg;
    if (msg.type == MessageType::Ack || msg.type == MessageType::Rst) {
        std::shared_ptr<Pending> p;
        {
            std::lock_guard lk(pending_mu_);
            auto it = pending_.find({dg.from, msg.message_id});
            if (it == pending_.end() || it->second->response || it->second->reset)
                return;
            p = it->second;
            if (msg.type == MessageType::Rst)
                p->reset = true;
            else
                p->response = msg;
        }
        pending_cv_.notify_all();
        return;
    }

    if (is_request(msg.code)) {
        if (msg.type == MessageType::Con && dedup_check({dg.from, msg.message_id}))
            return;
        post([this, in = std::move(in)]() mutable { handle_request(std::move(in)); });
        return;
    }

    // Response-coded CON/NON: an observe notification.
    if (msg.type == MessageType::Con) {
        Message ack;
        ack.type = MessageType::Ack;
        ack.code = Code::Empty;
        ack.message_id = msg.message_id;
        send_message(dg.from, ack);
    }
    if (notification_handler_)
        post([this, in = std::move(in)] { notification_handler_(in); });
}

void CoapEndpoint::handle_request(Incoming in)
{
    std::optional<Message> response;
    if (is_handshake_path(in.msg.path_only()))
        response = handle_handshake(in);
    else if (request_handler_)
        response = request_handler_(in);
    else
        response = make_response(in.msg, Code::NotFound);
    if (!response)
        return;
    Key key{in.peer, in.msg.message_id};
    send_message(in.peer, *response, in.msg.type == MessageType::Con ? &key : nullptr);
}

Message CoapEndpoint::handle_handshake(const Incoming& in)
{
    const auto& req = in.msg;
    auto path = req.path_only();
    auto notify = [&](const std::string& identity, std::optional<HandshakeErrc> err) {
        if (handshake_observer_)
            handshake_observer_(in.peer, identity, err);
    };

    if (req.code != Code::Post)
        return make_response(req, Code::MethodNotAllowed);

    if (path == kHelloPath) {
        Hello hello;
        try {
            hello = Hello::decode(req.payload);
        } catch (const HandshakeError&) {
            return handshake_reply(req, Code::BadRequest, kChallengePath);
        }
        std::optional<Bytes> psk = resolver_ ? resolver_(in.peer, hello.identity) : std::nullopt;
        if (!psk) {
            notify(hello.identity, HandshakeErrc::UnknownIdentity);
            return handshake_reply(req, Code::NotFound, kChallengePath);
        }
        HandshakeResponder responder(hello, std::move(*psk), Clock::now());
        auto challenge = responder.challenge().encode();
        {
            std::lock_guard lk(session_mu_);
            auto now = Clock::now();
            std::erase_if(responders_, [&](const auto& kv) { return kv.second.expired(now); });
            responders_.insert_or_assign(in.peer, std::move(responder));
        }
        return handshake_reply(req, Code::Post, kChallengePath, std::move(challenge));
    }

    if (path == kFinishPath) {
        std::optional<HandshakeResponder> responder;
        {
            std::lock_guard lk(session_mu_);
            auto it = responders_.find(in.peer);
            if (it != responders_.end()) {
                responder.emplace(std::move(it->second));
                responders_.erase(it);
            }
        }
        auto reject = [&](HandshakeErrc e, const std::string& identity) {
            notify(identity, e);
            return handshake_reply(req, Code::Unauthorized, kFinishPath, to_bytes(to_string(e)));
        };
        if (!responder)
            return reject(HandshakeErrc::Timeout, "");
        try {
            auto finish = Finish::decode(req.payload);
            auto s = responder->on_finish(finish, Clock::now());
            auto identity = s.peer_identity;
            install_session(in.peer, std::move(s));
            notify(identity, std::nullopt);
            return handshake_reply(req, Code::Changed, kFinishPath);
        } catch (const HandshakeError& e) {
            return reject(e.code(), "");
        }
    }

    return handshake_reply(req, Code::NotFound, path);
}

bool CoapEndpoint::dedup_check(const Key& key)
{
    std::optional<Bytes> replay;
    {
        std::lock_guard lk(dedup_mu_);
        auto now = Clock::now();
        while (!dedup_order_.empty() &&
               (now - dedup_order_.front().second > opts_.dedup_lifetime || dedup_order_.size() > opts_.dedup_capacity)) {
            auto it = dedup_.find(dedup_order_.front().first);
            if (it != dedup_.end() && it->second.at == dedup_order_.front().second)
                dedup_.erase(it);
            dedup_order_.pop_front();
        }
        auto it = dedup_.find(key);
        if (it == dedup_.end()) {
            dedup_.emplace(key, DedupEntry{now, std::nullopt});
            dedup_order_.emplace_back(key, now);
            return false;
        }
        replay = it->second.response;
    }
    if (replay)
        send_raw(key.first, *replay);
    return true;
}

void CoapEndpoint::send_message(const net::SockAddr& peer, const Message& msg, const Key* dedup_key)
{
    Bytes data = encode(msg);
    if (msg.type != MessageType::Rst && !is_handshake_path(msg.path_only())) {
        if (auto s = session(peer))
            data = seal(data, *s);
    }
    if (dedup_key) {
        std::lock_guard lk(dedup_mu_);
        auto it = dedup_.find(*dedup_key);
        if (it != dedup_.end())
            it->second.response = data;
    }
    send_raw(peer, data);
}

void CoapEndpoint::send_raw(const net::SockAddr& peer, ByteView data)
{
    if (transcript_)
        transcript_(Direction::Out, peer, data);
    try {
        socket_.send_to(peer, data);
    } catch (const net::NetError& e) {
        spdlog::debug("coap: send to {} failed: {}", peer.to_string(), e.what());
    }
}

Message CoapEndpoint::request(const net::SockAddr& peer, Message msg)
{
    if (msg.type != MessageType::Con)
        throw std::logic_error("request: message must be confirmable");
    if (!running_)
        throw EndpointError(EndpointErrc::Stopped);
    msg.message_id = next_message_id();
    Key key{peer, msg.message_id};
    auto p = std::make_shared<Pending>();
    {
        std::lock_guard lk(pending_mu_);
        pending_[key] = p;
    }
    struct Cleanup {
        CoapEndpoint* self;
        Key key;
        ~Cleanup()
        {
            std::lock_guard lk(self->pending_mu_);
            self->pending_.erase(key);
        }
    } cleanup{this, key};

    auto timeout = opts_.ack_timeout;
    for (unsigned attempt = 0; attempt <= opts_.max_retransmit; ++attempt) {
        send_message(peer, msg);
        std::unique_lock lk(pending_mu_);
        bool done = pending_cv_.wait_for(lk, timeout, [&] { return p->response || p->reset || !running_; });
        if (done) {
            if (p->response)
                return std::move(*p->response);
            if (p->reset)
                throw EndpointError(EndpointErrc::Reset);
            throw EndpointError(EndpointErrc::Stopped);
        }
        timeout *= 2;
    }
    throw EndpointError(EndpointErrc::Timeout);
}

void CoapEndpoint::send(const net::SockAddr& peer, Message msg)
{
    msg.message_id = next_message_id();
    send_message(peer, msg);
}

PskSession CoapEndpoint::handshake(const net::SockAddr& peer, const std::string& identity, ByteView psk)
{
    HandshakeInitiator init(identity, Bytes(psk.begin(), psk.end()));

    Message hello;
    hello.code = Code::Post;
    hello.path = std::string(kHelloPath);
    hello.payload = init.hello().encode();
    auto r1 = request(peer, hello);
    if (r1.code == Code::NotFound)
        throw HandshakeError(HandshakeErrc::UnknownIdentity);
    if (r1.code != Code::Post || r1.path != kChallengePath)
        throw HandshakeError(HandshakeErrc::Protocol);
    auto finish = init.on_challenge(Challenge::decode(r1.payload));

    Message fin;
    fin.code = Code::Post;
    fin.path = std::string(kFinishPath);
    fin.payload = finish.encode();
    auto r2 = request(peer, fin);
    if (r2.code == Code::Unauthorized) {
        auto reason = lm2m::to_string(ByteView(r2.payload));
        throw HandshakeError(reason == to_string(HandshakeErrc::Timeout) ? HandshakeErrc::Timeout
                                                                          : HandshakeErrc::BadProof);
    }
    if (r2.code != Code::Changed || r2.path != kFinishPath)
        throw HandshakeError(HandshakeErrc::Protocol);
    auto s = init.complete();
    install_session(peer, s);
    return s;
}

void CoapEndpoint::install_session(const net::SockAddr& peer, PskSession s)
{
    {
        std::lock_guard lk(session_mu_);
        sessions_.insert_or_assign(peer, std::move(s));
    }
    std::lock_guard lk(dedup_mu_);
    std::erase_if(dedup_, [&](const auto& kv) { return kv.first.first == peer; });
}

std::optional<PskSession> CoapEndpoint::session(const net::SockAddr& peer) const
{
    std::lock_guard lk(session_mu_);
    auto it = sessions_.find(peer);
    if (it == sessions_.end())
        return std::nullopt;
    return it->second;
}

void CoapEndpoint::drop_session(const net::SockAddr& peer)
{
    std::lock_guard lk(session_mu_);
    sessions_.erase(peer);
}

void CoapEndpoint::drop_all_sessions()
{
    std::lock_guard lk(session_mu_);
    sessions_.clear();
}

} // namespace lm2m::wire
