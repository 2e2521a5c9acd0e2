#pragma once

// Client-side steps of the LwM2M lifecycle, shared by the simulator and the
// benchmark harness.

#include "lm2m/bootstrap/bootstrap_server.hpp"
#include "lm2m/wire/endpoint.hpp"

namespace lm2m::sim {

enum class FlowErrc { BootstrapFailed, RegisterFailed, UpdateFailed };
std::string_view to_string(FlowErrc c);

class FlowError : public std::runtime_error {
public:
    FlowError(FlowErrc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }
    FlowErrc code() const { return code_; }

private:
    FlowErrc code_;
};

/// Handshake with the bootstrap server, then POST /bs?ep=. Throws FlowError{BootstrapFailed}.
bootstrap::BootstrapConfig bootstrap(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& identity,
                                     ByteView psk, const std::string& endpoint);

/// Handshake with the DM server, then POST /rd. Returns the reg_id. Throws FlowError{RegisterFailed}.
std::string register_client(wire::CoapEndpoint& ep, const net::SockAddr& server, const bootstrap::BootstrapConfig& cfg,
                            const std::string& endpoint, std::uint64_t lifetime_s,
                            const std::vector<std::string>& links);

/// POST /rd/<reg_id>. Throws FlowError{UpdateFailed}.
void update_registration(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& reg_id,
                         std::optional<std::uint64_t> lifetime_s = std::nullopt);

/// DELETE /rd/<reg_id>; returns false when the server did not confirm.
bool deregister(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& reg_id);

} // namespace lm2m::sim
