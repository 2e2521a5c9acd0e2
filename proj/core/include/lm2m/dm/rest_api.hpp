#pragma once

#include "lm2m/auth/auth_service.hpp"
#include "lm2m/dm/dm_server.hpp"
#include "lm2m/http/server.hpp"

namespace lm2m::dm {

/// JSON rendering of a resource value: {"kind": ..., "value": ...}; Opaque is hex.
std::string value_to_json(const wire::ResourceValue& v);
/// Inverse of value_to_json; throws std::invalid_argument.
wire::ResourceValue value_from_json(std::string_view text);

/// HTTP front end under /api for external applications. Admin and
/// Application tokens are accepted; User tokens get 403.
///
///   POST   /api/login
///   GET    /api/clients
///   GET    /api/clients/{ep}/{obj}/{inst}/{res}          read
///   PUT    /api/clients/{ep}/{obj}/{inst}/{res}          write, body {"kind","value"}
///   POST   /api/clients/{ep}/{obj}/{inst}/{res}/exec     execute
///   POST   /api/clients/{ep}/{obj}/{inst}/{res}/observe  subscribe
///   GET    /api/clients/{ep}/{obj}/{inst}/{res}/observe  text/event-stream, "data: <ts> <value>"
///   DELETE /api/clients/{ep}/{obj}/{inst}/{res}/observe  cancel
///
/// The observe routes take an optional ?subscriber= id, defaulting to the token subject.
class RestApi {
public:
    RestApi(DmServer& server, const auth::TokenService& tokens, const auth::AuthService* auth,
            http::HttpOptions options);
    ~RestApi();

    void start();
    void stop();
    std::uint16_t port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lm2m::dm
