#include "lm2m/dm/registration.hpp"

#include "lm2m/util/crypto.hpp"
#include "lm2m/wire/path.hpp"

#include <chrono>

namespace lm2m::dm {

namespace {

std::uint64_t system_ms()
{
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

} // namespace

std::optional<std::vector<std::string>> parse_links(std::string_view text)
{
    std::vector<std::string> out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        if (item.size() < 3 || item.front() != '<' || item.back() != '>')
            return std::nullopt;
        auto path = wire::Path::try_parse(item.substr(1, item.size() - 2));
        if (!path)
            return std::nullopt;
        out.push_back(path->to_string());
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
        if (text.empty())
            return std::nullopt;
    }
    return out;
}

std::string format_links(const std::vector<std::string>& links)
{
    std::string out;
    for (const auto& l : links) {
        if (!out.empty())
            out += ',';
        out += '<' + l + '>';
    }
    return out;
}

RegistrationTable::RegistrationTable(Clock clock) : clock_(clock ? std::move(clock) : Clock(system_ms)) {}

std::string RegistrationTable::fresh_id() const
{
    static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    for (;;) {
        auto rnd = crypto::random_bytes(8);
        std::string id;
        for (auto b : rnd)
            id += alphabet[b % alphabet.size()];
        if (!by_id_.contains(id))
            return id;
    }
}

RegistrationTable::RegisterResult RegistrationTable::register_client(const std::string& endpoint,
                                                                      const net::SockAddr& addr,
                                                                      std::uint64_t lifetime_s,
                                                                      std::vector<std::string> links,
                                                                      std::string identity)
{
    std::lock_guard lk(mutex_);
    RegisterResult result;
    if (auto it = id_by_endpoint_.find(endpoint); it != id_by_endpoint_.end()) {
        auto old = by_id_.find(it->second);
        result.replaced = std::move(old->second);
        by_id_.erase(old);
    }
    RegistrationEntry e{fresh_id(), endpoint, addr, lifetime_s, clock_(), std::move(links), std::move(identity)};
    id_by_endpoint_[endpoint] = e.reg_id;
    by_id_[e.reg_id] = e;
    result.entry = std::move(e);
    return result;
}

std::optional<RegistrationEntry> RegistrationTable::update(const std::string& reg_id,
                                                           std::optional<std::uint64_t> lifetime_s,
                                                           const net::SockAddr& addr)
{
    std::lock_guard lk(mutex_);
    auto it = by_id_.find(reg_id);
    auto now = clock_();
    if (it == by_id_.end() || it->second.expired(now))
        return std::nullopt;
    it->second.last_update_ms = now;
    it->second.remote_addr = addr;
    if (lifetime_s)
        it->second.lifetime_s = *lifetime_s;
    return it->second;
}

std::optional<RegistrationEntry> RegistrationTable::deregister(const std::string& reg_id)
{
    std::lock_guard lk(mutex_);
    auto it = by_id_.find(reg_id);
    if (it == by_id_.end() || it->second.expired(clock_()))
        return std::nullopt;
    auto e = std::move(it->second);
    by_id_.erase(it);
    id_by_endpoint_.erase(e.endpoint);
    return e;
}

std::optional<RegistrationEntry> RegistrationTable::find_endpoint(const std::string& endpoint) const
{
    std::lock_guard lk(mutex_);
    auto it = id_by_endpoint_.find(endpoint);
    if (it == id_by_endpoint_.end())
        return std::nullopt;
    const auto& e = by_id_.at(it->second);
    if (e.expired(clock_()))
        return std::nullopt;
    return e;
}

std::optional<RegistrationEntry> RegistrationTable::find(const std::string& reg_id) const
{
    std::lock_guard lk(mutex_);
    auto it = by_id_.find(reg_id);
    if (it == by_id_.end() || it->second.expired(clock_()))
        return std::nullopt;
    return it->second;
}

std::vector<RegistrationEntry> RegistrationTable::list() const
{
    std::lock_guard lk(mutex_);
    auto now = clock_();
    std::vector<RegistrationEntry> out;
    for (const auto& [ep, id] : id_by_endpoint_) {
        const auto& e = by_id_.at(id);
        if (!e.expired(now))
            out.push_back(e);
    }
    return out;
}

std::vector<RegistrationEntry> RegistrationTable::sweep()
{
    std::lock_guard lk(mutex_);
    auto now = clock_();
    std::vector<RegistrationEntry> removed;
    for (auto it = by_id_.begin(); it != by_id_.end();) {
        if (it->second.expired(now)) {
            id_by_endpoint_.erase(it->second.endpoint);
            removed.push_back(std::move(it->second));
            it = by_id_.erase(it);
        } else {
            ++it;
        }
    }
    return removed;
}

} // namespace lm2m::dm
