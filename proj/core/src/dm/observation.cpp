#include "lm2m/dm/observation.hpp"

#include "lm2m/util/crypto.hpp"

namespace lm2m::dm {

Subscription::Subscription(std::string endpoint, std::string path, std::string subscriber, std::size_t capacity)
    : endpoint_(std::move(endpoint)), path_(std::move(path)), subscriber_(std::move(subscriber)),
      capacity_(capacity == 0 ? 1 : capacity)
{
}

void Subscription::push(Notification n)
{
    {
        std::lock_guard lk(mutex_);
        if (closed_)
            return;
        if (queue_.size() >= capacity_) {
            queue_.pop_front();
            ++dropped_;
        }
        queue_.push_back(std::move(n));
        ++delivered_;
    }
    cv_.notify_all();
}

std::optional<Notification> Subscription::pop(std::chrono::milliseconds timeout)
{
    std::unique_lock lk(mutex_);
    cv_.wait_for(lk, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty())
        return std::nullopt;
    auto n = std::move(queue_.front());
    queue_.pop_front();
    return n;
}

void Subscription::close()
{
    {
        std::lock_guard lk(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool Subscription::closed() const
{
    std::lock_guard lk(mutex_);
    return closed_;
}

std::uint64_t Subscription::dropped() const
{
    std::lock_guard lk(mutex_);
    return dropped_;
}

std::uint64_t Subscription::delivered() const
{
    std::lock_guard lk(mutex_);
    return delivered_;
}

ObservationHub::SubscribeResult ObservationHub::subscribe(const std::string& endpoint, const std::string& path,
                                                          const std::string& subscriber)
{
    std::lock_guard lk(mutex_);
    SubscribeResult r;
    auto key = Key{endpoint, path};
    auto it = upstreams_.find(key);
    if (it == upstreams_.end()) {
        Bytes token;
        do {
            token = crypto::random_bytes(8);
        } while (by_token_.contains(token));
        it = upstreams_.emplace(key, Upstream{token, {}}).first;
        by_token_.emplace(token, key);
        r.start_upstream = true;
    }
    r.token = it->second.token;
    auto& subs = it->second.subscribers;
    auto sit = subs.find(subscriber);
    if (sit == subs.end())
        sit = subs.emplace(subscriber, std::make_shared<Subscription>(endpoint, path, subscriber, capacity_)).first;
    r.subscription = sit->second;
    return r;
}

void ObservationHub::erase_upstream(std::map<Key, Upstream>::iterator it)
{
    for (auto& [name, sub] : it->second.subscribers) {
        dropped_closed_ += sub->dropped();
        sub->close();
    }
    by_token_.erase(it->second.token);
    upstreams_.erase(it);
}

ObservationHub::CancelResult ObservationHub::cancel(const std::string& endpoint, const std::string& path,
                                                    const std::string& subscriber)
{
    std::lock_guard lk(mutex_);
    CancelResult r;
    auto it = upstreams_.find({endpoint, path});
    if (it == upstreams_.end())
        return r;
    auto& subs = it->second.subscribers;
    auto sit = subs.find(subscriber);
    if (sit == subs.end())
        return r;
    r.found = true;
    dropped_closed_ += sit->second->dropped();
    sit->second->close();
    subs.erase(sit);
    if (subs.empty()) {
        r.stop_upstream = it->second.token;
        erase_upstream(it);
    }
    return r;
}

void ObservationHub::fail_upstream(const std::string& endpoint, const std::string& path)
{
    std::lock_guard lk(mutex_);
    auto it = upstreams_.find({endpoint, path});
    if (it != upstreams_.end())
        erase_upstream(it);
}

std::optional<std::string> ObservationHub::deliver(ByteView token, const Notification& n)
{
    std::lock_guard lk(mutex_);
    auto t = by_token_.find(Bytes(token.begin(), token.end()));
    if (t == by_token_.end())
        return std::nullopt;
    auto& up = upstreams_.at(t->second);
    for (auto& [name, sub] : up.subscribers)
        sub->push(n);
    return t->second.first;
}

std::optional<std::string> ObservationHub::owner(ByteView token) const
{
    std::lock_guard lk(mutex_);
    auto t = by_token_.find(Bytes(token.begin(), token.end()));
    if (t == by_token_.end())
        return std::nullopt;
    return t->second.first;
}

void ObservationHub::drop_endpoint(const std::string& endpoint)
{
    std::lock_guard lk(mutex_);
    for (auto it = upstreams_.begin(); it != upstreams_.end();) {
        auto next = std::next(it);
        if (it->first.first == endpoint)
            erase_upstream(it);
        it = next;
    }
}

std::shared_ptr<Subscription> ObservationHub::find(const std::string& endpoint, const std::string& path,
                                                   const std::string& subscriber) const
{
    std::lock_guard lk(mutex_);
    auto it = upstreams_.find({endpoint, path});
    if (it == upstreams_.end())
        return nullptr;
    auto sit = it->second.subscribers.find(subscriber);
    return sit == it->second.subscribers.end() ? nullptr : sit->second;
}

std::size_t ObservationHub::upstream_count() const
{
    std::lock_guard lk(mutex_);
    return upstreams_.size();
}

std::uint64_t ObservationHub::dropped_total() const
{
    std::lock_guard lk(mutex_);
    std::uint64_t total = dropped_closed_;
    for (const auto& [key, up] : upstreams_)
        for (const auto& [name, sub] : up.subscribers)
            total += sub->dropped();
    return total;
}

} // namespace lm2m::dm
