#pragma once

#include "lm2m/wire/resource_value.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace lm2m::dm {

struct Notification {
    std::uint64_t timestamp_ms = 0;
    wire::ResourceValue value;
};

/// Bounded per-subscriber queue; on overflow the oldest item is dropped.
class Subscription {
public:
    Subscription(std::string endpoint, std::string path, std::string subscriber, std::size_t capacity);

    void push(Notification n);
    /// Waits up to `timeout`; nullopt on timeout, or when closed and drained.
    std::optional<Notification> pop(std::chrono::milliseconds timeout);
    void close();
    bool closed() const;
    std::uint64_t dropped() const;
    std::uint64_t delivered() const;

    const std::string& endpoint() const { return endpoint_; }
    const std::string& path() const { return path_; }
    const std::string& subscriber() const { return subscriber_; }

private:
    std::string endpoint_;
    std::string path_;
    std::string subscriber_;
    std::size_t capacity_;

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Notification> queue_;
    bool closed_ = false;
    std::uint64_t dropped_ = 0;
    std::uint64_t delivered_ = 0;
};

/// One upstream observation per (endpoint, path), fanned out to subscribers.
class ObservationHub {
public:
    explicit ObservationHub(std::size_t queue_capacity = 64) : capacity_(queue_capacity) {}

    struct SubscribeResult {
        std::shared_ptr<Subscription> subscription;
        /// Token of the upstream observation.
        Bytes token;
        /// True when the caller must start the upstream observation.
        bool start_upstream = false;
    };

    /// Returns the existing subscription when (endpoint, path, subscriber) is already present.
    SubscribeResult subscribe(const std::string& endpoint, const std::string& path, const std::string& subscriber);

    struct CancelResult {
        bool found = false;
        /// Set when the last subscriber left and the upstream must be cancelled.
        std::optional<Bytes> stop_upstream;
    };
    CancelResult cancel(const std::string& endpoint, const std::string& path, const std::string& subscriber);

    /// Closes every subscription of a failed upstream.
    void fail_upstream(const std::string& endpoint, const std::string& path);

    /// Routes a notification by upstream token. Returns the owning endpoint, or
    /// nullopt for an unknown token.
    std::optional<std::string> deliver(ByteView token, const Notification& n);
    /// Endpoint owning a token without delivering.
    std::optional<std::string> owner(ByteView token) const;

    /// Closes and forgets everything attached to an endpoint.
    void drop_endpoint(const std::string& endpoint);

    std::shared_ptr<Subscription> find(const std::string& endpoint, const std::string& path,
                                       const std::string& subscriber) const;
    std::size_t upstream_count() const;
    std::uint64_t dropped_total() const;

private:
    struct Upstream {
        Bytes token;
        std::map<std::string, std::shared_ptr<Subscription>> subscribers;
    };
    using Key = std::pair<std::string, std::string>; // endpoint, path

    void erase_upstream(std::map<Key, Upstream>::iterator it);

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::map<Key, Upstream> upstreams_;
    std::map<Bytes, Key> by_token_;
    std::uint64_t dropped_closed_ = 0;
};

} // namespace lm2m::dm
