#pragma once

#include "lm2m/util/net.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace lm2m::dm {

inline constexpr std::uint64_t kDefaultLifetimeS = 86400;

struct RegistrationEntry {
    std::string reg_id;
    std::string endpoint;
    net::SockAddr remote_addr;
    std::uint64_t lifetime_s = kDefaultLifetimeS;
    std::uint64_t last_update_ms = 0;
    std::vector<std::string> object_links;
    /// PSK identity of the session that registered.
    std::string identity;

    bool expired(std::uint64_t now_ms) const
    {
        return now_ms > last_update_ms && now_ms - last_update_ms > lifetime_s * 1000;
    }
};

/// Parses "</1/0>,</3/0>" into {"/1/0", "/3/0"}. Returns nullopt when malformed.
std::optional<std::vector<std::string>> parse_links(std::string_view text);
std::string format_links(const std::vector<std::string>& links);

/// Live registrations keyed by reg_id, one per endpoint.
class RegistrationTable {
public:
    using Clock = std::function<std::uint64_t()>; // ms

    explicit RegistrationTable(Clock clock = {});

    struct RegisterResult {
        RegistrationEntry entry;
        std::optional<RegistrationEntry> replaced;
    };

    RegisterResult register_client(const std::string& endpoint, const net::SockAddr& addr, std::uint64_t lifetime_s,
                                   std::vector<std::string> links, std::string identity = {});
    /// Refreshes last_update_ms; nullopt when unknown or expired.
    std::optional<RegistrationEntry> update(const std::string& reg_id, std::optional<std::uint64_t> lifetime_s,
                                            const net::SockAddr& addr);
    std::optional<RegistrationEntry> deregister(const std::string& reg_id);

    std::optional<RegistrationEntry> find_endpoint(const std::string& endpoint) const;
    std::optional<RegistrationEntry> find(const std::string& reg_id) const;
    std::vector<RegistrationEntry> list() const;

    /// Removes expired entries and returns them.
    std::vector<RegistrationEntry> sweep();

    std::uint64_t now_ms() const { return clock_(); }

private:
    std::string fresh_id() const;

    Clock clock_;
    mutable std::mutex mutex_;
    std::map<std::string, RegistrationEntry> by_id_;
    std::map<std::string, std::string> id_by_endpoint_;
};

} // namespace lm2m::dm
