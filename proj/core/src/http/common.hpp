#pragma once

// Shared plumbing for the two HTTP front ends.

#include "lm2m/auth/token.hpp"
#include "lm2m/http/server.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <initializer_list>
#include <thread>

namespace lm2m::http {

using nlohmann::json;

inline void send_json(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, std::string_view message)
{
    send_json(res, status, json{{"error", message}});
}

/// Parses a JSON object body; sends 400 and returns nullopt otherwise.
inline std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res)
{
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        send_error(res, 400, "body must be a JSON object");
        return std::nullopt;
    }
    return body;
}

/// Bearer-token check plus role gate. Sends 401/403 and returns nullopt on failure.
inline std::optional<auth::Claims> authorize(const auth::TokenService& tokens, const httplib::Request& req,
                                             httplib::Response& res, std::initializer_list<contracts::Role> allowed)
{
    static constexpr std::string_view kBearer = "Bearer ";
    auto header = req.get_header_value("Authorization");
    if (header.rfind(kBearer, 0) != 0) {
        send_error(res, 401, "missing bearer token");
        return std::nullopt;
    }
    auth::Claims claims;
    try {
        claims = tokens.verify(std::string_view(header).substr(kBearer.size()));
    } catch (const auth::TokenError& e) {
        send_error(res, 401, e.what());
        return std::nullopt;
    }
    for (auto r : allowed)
        if (r == claims.role)
            return claims;
    send_error(res, 403, "role not permitted");
    return std::nullopt;
}

inline constexpr std::initializer_list<contracts::Role> kAllRoles = {
    contracts::Role::Admin, contracts::Role::User, contracts::Role::Application};

/// httplib server running on its own thread with optional CORS.
class Runner {
public:
    Runner(const HttpOptions& options, std::string name) : options_(options), name_(std::move(name))
    {
        server_.set_keep_alive_max_count(100);
        if (!options_.cors_origin.empty()) {
            server_.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
                res.set_header("Access-Control-Allow-Origin", options_.cors_origin);
                res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
                res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
            });
            server_.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        }
        server_.set_exception_handler([this](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "unknown";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            spdlog::error("{}: {} {} failed: {}", name_, req.method, req.path, what);
            send_error(res, 500, "internal error");
        });
    }

    ~Runner() { stop(); }

    httplib::Server& server() { return server_; }

    void start()
    {
        int port = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                                      : (server_.bind_to_port(options_.host, options_.port) ? options_.port : -1);
        if (port <= 0)
            throw std::runtime_error(name_ + ": cannot bind " + options_.host + ":" + std::to_string(options_.port));
        port_ = static_cast<std::uint16_t>(port);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        spdlog::info("{}: http on {}:{}", name_, options_.host, port_);
    }

    void stop()
    {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    std::uint16_t port() const { return port_; }

private:
    HttpOptions options_;
    std::string name_;
    httplib::Server server_;
    std::thread thread_;
    std::uint16_t port_ = 0;
};

} // namespace lm2m::http

#include "lm2m/auth/auth_service.hpp"

namespace lm2m::http {

/// POST body {"login": <username or email>, "password": ...}; "username" and
/// "email" are accepted in place of "login".
inline void handle_login(const auth::AuthService& auth, const httplib::Request& req, httplib::Response& res)
{
    auto body = parse_body(req, res);
    if (!body)
        return;
    std::string login;
    for (auto key : {"login", "username", "email"})
        if (body->contains(key) && (*body)[key].is_string()) {
            login = (*body)[key].get<std::string>();
            break;
        }
    if (!body->contains("password") || !(*body)["password"].is_string() || login.empty())
        return send_error(res, 400, "login and password required");
    try {
        auto r = auth.login(login, (*body)["password"].get<std::string>());
        send_json(res, 200,
                  json{{"token", r.token},
                       {"sub", r.claims.sub},
                       {"role", std::string(contracts::to_string(r.claims.role))},
                       {"exp", r.claims.exp}});
    } catch (const auth::InvalidCredentials&) {
        send_error(res, 401, "invalid credentials");
    }
}

} // namespace lm2m::http
