#include "lm2m/sim/client_flow.hpp"

#include "lm2m/dm/dm_server.hpp"

namespace lm2m::sim {

using wire::Code;
using wire::Message;

std::string_view to_string(FlowErrc c)
{
    switch (c) {
    case FlowErrc::BootstrapFailed: return "bootstrap failed";
    case FlowErrc::RegisterFailed: return "registration failed";
    case FlowErrc::UpdateFailed: return "registration update failed";
    }
    return "flow error";
}

namespace {

Message post(std::string path, Bytes payload = {})
{
    Message m;
    m.code = Code::Post;
    m.path = std::move(path);
    m.payload = std::move(payload);
    return m;
}

template <typename F>
auto guard(FlowErrc code, F&& f)
{
    try {
        return f();
    } catch (const FlowError&) {
        throw;
    } catch (const std::exception& e) {
        throw FlowError(code, e.what());
    }
}

} // namespace

bootstrap::BootstrapConfig bootstrap(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& identity,
                                     ByteView psk, const std::string& endpoint)
{
    return guard(FlowErrc::BootstrapFailed, [&] {
        ep.handshake(server, identity, psk);
        auto r = ep.request(server, post(std::string(bootstrap::kBootstrapPath) + "?ep=" + endpoint));
        if (r.code != Code::Changed)
            throw FlowError(FlowErrc::BootstrapFailed, std::string(wire::to_string(r.code)));
        return bootstrap::BootstrapConfig::decode(r.payload);
    });
}

std::string register_client(wire::CoapEndpoint& ep, const net::SockAddr& server, const bootstrap::BootstrapConfig& cfg,
                            const std::string& endpoint, std::uint64_t lifetime_s,
                            const std::vector<std::string>& links)
{
    return guard(FlowErrc::RegisterFailed, [&] {
        ep.handshake(server, cfg.server_psk_identity, cfg.server_psk_secret);
        auto path = std::string(dm::kRegistrationPath) + "?ep=" + endpoint + "&lt=" + std::to_string(lifetime_s);
        auto r = ep.request(server, post(path, to_bytes(dm::format_links(links))));
        if (r.code != Code::Created || r.payload.empty())
            throw FlowError(FlowErrc::RegisterFailed, std::string(wire::to_string(r.code)));
        return lm2m::to_string(ByteView(r.payload));
    });
}

void update_registration(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& reg_id,
                         std::optional<std::uint64_t> lifetime_s)
{
    guard(FlowErrc::UpdateFailed, [&] {
        auto path = std::string(dm::kRegistrationPath) + "/" + reg_id;
        if (lifetime_s)
            path += "?lt=" + std::to_string(*lifetime_s);
        auto r = ep.request(server, post(path));
        if (r.code != Code::Changed)
            throw FlowError(FlowErrc::UpdateFailed, std::string(wire::to_string(r.code)));
        return 0;
    });
}

bool deregister(wire::CoapEndpoint& ep, const net::SockAddr& server, const std::string& reg_id)
{
    Message m;
    m.code = Code::Delete;
    m.path = std::string(dm::kRegistrationPath) + "/" + reg_id;
    try {
        return ep.request(server, m).code == Code::Deleted;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace lm2m::sim
