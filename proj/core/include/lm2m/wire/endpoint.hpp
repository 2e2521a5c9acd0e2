#pragma once

#include "lm2m/util/net.hpp"
#include "lm2m/wire/message.hpp"
#include "lm2m/wire/psk.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace lm2m::wire {

enum class EndpointErrc { Timeout, Reset, Stopped };
std::string_view to_string(EndpointErrc c);

class EndpointError : public std::runtime_error {
public:
    explicit EndpointError(EndpointErrc code)
        : std::runtime_error(std::string(to_string(code))), code_(code)
    {
    }
    EndpointErrc code() const { return code_; }

private:
    EndpointErrc code_;
};

struct Incoming {
    net::SockAddr peer;
    /// Identity bound to the peer's session; empty for plain handshake traffic.
    std::string identity;
    Message msg;
};

struct EndpointOptions {
    std::chrono::milliseconds ack_timeout{2000};
    unsigned max_retransmit = 4;
    unsigned workers = 2;
    std::chrono::milliseconds dedup_lifetime{60'000};
    std::size_t dedup_capacity = 4096;
};

/// One UDP socket speaking mini-CoAP with per-peer PSK sessions.
///
/// Datagrams from a peer with a session must be sealed; plain datagrams are
/// accepted only for handshake paths and RST. An unauthenticated CON request
/// is answered with a plain RST so the sender can re-handshake.
class CoapEndpoint {
public:
    enum class Direction { In, Out };
    using RequestHandler = std::function<std::optional<Message>(const Incoming&)>;
    using NotificationHandler = std::function<void(const Incoming&)>;
    using PskResolver = std::function<std::optional<Bytes>(const net::SockAddr&, const std::string& identity)>;
    /// Called after each responder-side handshake; `error` empty on success.
    using HandshakeObserver =
        std::function<void(const net::SockAddr&, const std::string& identity, std::optional<HandshakeErrc> error)>;
    using TranscriptHook = std::function<void(Direction, const net::SockAddr&, ByteView)>;

    explicit CoapEndpoint(const net::SockAddr& bind, EndpointOptions opts = {});
    ~CoapEndpoint();
    CoapEndpoint(const CoapEndpoint&) = delete;
    CoapEndpoint& operator=(const CoapEndpoint&) = delete;

    // Install handlers before start().
    void on_request(RequestHandler h) { request_handler_ = std::move(h); }
    void on_notification(NotificationHandler h) { notification_handler_ = std::move(h); }
    void set_psk_resolver(PskResolver r) { resolver_ = std::move(r); }
    void on_handshake(HandshakeObserver o) { handshake_observer_ = std::move(o); }
    void set_transcript_hook(TranscriptHook h) { transcript_ = std::move(h); }

    void start();
    void stop();
    net::SockAddr local_addr() const { return socket_.local_addr(); }
    const EndpointOptions& options() const { return opts_; }

    /// Sends a CON request and waits for the piggybacked response, retransmitting
    /// with exponential backoff. Assigns the message id.
    /// Throws EndpointError{Timeout | Reset | Stopped}.
    Message request(const net::SockAddr& peer, Message msg);
    /// Fire-and-forget; assigns the message id.
    void send(const net::SockAddr& peer, Message msg);

    /// Initiator side of the PSK handshake; installs the session on success.
    /// Throws HandshakeError or EndpointError.
    PskSession handshake(const net::SockAddr& peer, const std::string& identity, ByteView psk);

    std::optional<PskSession> session(const net::SockAddr& peer) const;
    void drop_session(const net::SockAddr& peer);
    void drop_all_sessions();

    std::uint16_t next_message_id() { return next_mid_.fetch_add(1); }

private:
    using Key = std::pair<net::SockAddr, std::uint16_t>;
    struct Pending {
        std::optional<Message> response;
        bool reset = false;
    };
    struct DedupEntry {
        std::chrono::steady_clock::time_point at;
        std::optional<Bytes> response;
    };

    void receive_loop();
    void worker_loop();
    void post(std::function<void()> task);
    void process(net::Datagram dg);
    void handle_request(Incoming in);
    Message handle_handshake(const Incoming& in);
    void send_message(const net::SockAddr& peer, const Message& msg, const Key* dedup_key = nullptr);
    void send_raw(const net::SockAddr& peer, ByteView data);
    void install_session(const net::SockAddr& peer, PskSession s);
    /// Returns true when the request was already seen (and replays its response).
    bool dedup_check(const Key& key);

    EndpointOptions opts_;
    net::UdpSocket socket_;
    RequestHandler request_handler_;
    NotificationHandler notification_handler_;
    PskResolver resolver_;
    HandshakeObserver handshake_observer_;
    TranscriptHook transcript_;

    std::atomic<bool> running_{false};
    std::atomic<std::uint16_t> next_mid_;
    std::thread rx_thread_;
    std::vector<std::thread> workers_;

    std::mutex task_mu_;
    std::condition_variable task_cv_;
    std::deque<std::function<void()>> tasks_;

    std::mutex pending_mu_;
    std::condition_variable pending_cv_;
    std::map<Key, std::shared_ptr<Pending>> pending_;

    mutable std::mutex session_mu_;
    std::map<net::SockAddr, PskSession> sessions_;
    std::map<net::SockAddr, HandshakeResponder> responders_;

    std::mutex dedup_mu_;
    std::map<Key, DedupEntry> dedup_;
    std::deque<std::pair<Key, std::chrono::steady_clock::time_point>> dedup_order_;
};

} // namespace lm2m::wire
