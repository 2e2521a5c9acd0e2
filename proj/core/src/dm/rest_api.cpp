#include "lm2m/dm/rest_api.hpp"

#include "../http/common.hpp"

#include <cmath>

namespace lm2m::dm {

using http::json;
using http::send_error;
using http::send_json;
using contracts::Role;
using Kind = wire::ResourceValue::Kind;

namespace {

json value_json(const wire::ResourceValue& v)
{
    json j{{"kind", std::string(wire::to_string(v.kind()))}};
    switch (v.kind()) {
    case Kind::None: j["value"] = nullptr; break;
    case Kind::Text: j["value"] = v.as_text(); break;
    case Kind::Integer: j["value"] = v.as_integer(); break;
    case Kind::Float: j["value"] = v.as_float(); break;
    case Kind::Opaque: j["value"] = to_hex(v.as_opaque()); break;
    }
    return j;
}

wire::ResourceValue value_from(const json& j)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw std::invalid_argument("value needs a kind");
    auto kind = j["kind"].get<std::string>();
    const json v = j.contains("value") ? j["value"] : json();
    if (kind == "None")
        return {};
    if (kind == "Text" && v.is_string())
        return wire::ResourceValue::text(v.get<std::string>());
    if (kind == "Integer" && v.is_number_integer())
        return wire::ResourceValue::integer(v.get<std::int64_t>());
    if (kind == "Float" && v.is_number())
        return wire::ResourceValue::number(v.get<double>());
    if (kind == "Opaque" && v.is_string())
        return wire::ResourceValue::opaque(from_hex(v.get<std::string>()));
    throw std::invalid_argument("value does not match kind");
}

json entry_json(const RegistrationEntry& e)
{
    return json{{"endpoint", e.endpoint},
                {"reg_id", e.reg_id},
                {"address", e.remote_addr.to_string()},
                {"lifetime_s", e.lifetime_s},
                {"last_update_ms", e.last_update_ms},
                {"object_links", e.object_links}};
}

int client_status(wire::Code c)
{
    switch (c) {
    case wire::Code::NotFound: return 404;
    case wire::Code::BadRequest: return 400;
    case wire::Code::MethodNotAllowed: return 405;
    case wire::Code::Unauthorized: return 403;
    default: return 502;
    }
}

void send_dm_error(httplib::Response& res, const DmError& e)
{
    switch (e.code()) {
    case DmErrc::NotRegistered: return send_error(res, 404, e.what());
    case DmErrc::ClientTimeout: return send_error(res, 504, e.what());
    case DmErrc::ClientError: {
        auto code = e.client_code().value_or(wire::Code::BadRequest);
        return send_json(res, client_status(code),
                         json{{"error", e.what()}, {"client_code", std::string(wire::to_string(code))}});
    }
    }
}

constexpr auto kResource = R"(/api/clients/([^/]+)/(\d+)/(\d+)/(\d+))";

} // namespace

std::string value_to_json(const wire::ResourceValue& v) { return value_json(v).dump(); }

wire::ResourceValue value_from_json(std::string_view text)
{
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw std::invalid_argument("invalid JSON");
    return value_from(j);
}

struct RestApi::Impl {
    DmServer& dm;
    const auth::TokenService& tokens;
    const auth::AuthService* auth;
    http::Runner runner;

    Impl(DmServer& d, const auth::TokenService& t, const auth::AuthService* a, const http::HttpOptions& o)
        : dm(d), tokens(t), auth(a), runner(o, "api")
    {
        routes();
    }

    std::optional<auth::Claims> gate(const httplib::Request& req, httplib::Response& res)
    {
        return http::authorize(tokens, req, res, {Role::Admin, Role::Application});
    }

    /// Endpoint and path from the route captures; sends 400 on a bad path.
    std::optional<std::pair<std::string, wire::Path>> target(const httplib::Request& req, httplib::Response& res)
    {
        auto path = wire::Path::try_parse("/" + req.matches[2].str() + "/" + req.matches[3].str() + "/" +
                                          req.matches[4].str());
        if (!path) {
            send_error(res, 400, "invalid resource path");
            return std::nullopt;
        }
        return std::make_pair(req.matches[1].str(), *path);
    }

    static std::string subscriber(const httplib::Request& req, const auth::Claims& claims)
    {
        auto s = req.get_param_value("subscriber");
        return s.empty() ? claims.sub : s;
    }

    template <typename F>
    void guarded(httplib::Response& res, F&& f)
    {
        try {
            f();
        } catch (const DmError& e) {
            send_dm_error(res, e);
        }
    }

    void routes()
    {
        auto& s = runner.server();

        s.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
            if (!auth)
                return send_error(res, 404, "login not available");
            http::handle_login(*auth, req, res);
        });

        s.Get("/api/clients", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res))
                return;
            json out = json::array();
            for (const auto& e : dm.registrations().list())
                out.push_back(entry_json(e));
            send_json(res, 200, out);
        });

        s.Get(kResource, [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res))
                return;
            auto t = target(req, res);
            if (!t)
                return;
            guarded(res, [&] {
                auto v = dm.read(t->first, t->second);
                auto j = value_json(v);
                j["endpoint"] = t->first;
                j["path"] = t->second.to_string();
                j["timestamp_ms"] = dm.registrations().now_ms();
                send_json(res, 200, j);
            });
        });

        s.Put(kResource, [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res))
                return;
            auto t = target(req, res);
            if (!t)
                return;
            wire::ResourceValue value;
            try {
                value = value_from_json(req.body);
            } catch (const std::exception& e) {
                return send_error(res, 400, e.what());
            }
            guarded(res, [&] {
                dm.write(t->first, t->second, value);
                send_json(res, 200, json{{"status", "Changed"}});
            });
        });

        s.Post(std::string(kResource) + "/exec", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res))
                return;
            auto t = target(req, res);
            if (!t)
                return;
            guarded(res, [&] {
                dm.execute(t->first, t->second);
                send_json(res, 200, json{{"status", "Changed"}});
            });
        });

        const std::string observe = std::string(kResource) + "/observe";

        s.Post(observe, [this](const httplib::Request& req, httplib::Response& res) {
            auto claims = gate(req, res);
            if (!claims)
                return;
            auto t = target(req, res);
            if (!t)
                return;
            guarded(res, [&] {
                auto sub = subscriber(req, *claims);
                dm.observe(t->first, t->second, sub);
                send_json(res, 200, json{{"endpoint", t->first}, {"path", t->second.to_string()}, {"subscriber", sub}});
            });
        });

        s.Delete(observe, [this](const httplib::Request& req, httplib::Response& res) {
            auto claims = gate(req, res);
            if (!claims)
                return;
            auto t = target(req, res);
            if (!t)
                return;
            if (!dm.cancel_observe(t->first, t->second, subscriber(req, *claims)))
                return send_error(res, 404, "no such observation");
            send_json(res, 200, json{{"status", "Cancelled"}});
        });

        s.Get(observe, [this](const httplib::Request& req, httplib::Response& res) {
            auto claims = gate(req, res);
            if (!claims)
                return;
            auto t = target(req, res);
            if (!t)
                return;
            auto sub = dm.observations().find(t->first, t->second.to_string(), subscriber(req, *claims));
            if (!sub)
                return send_error(res, 404, "no such observation");
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider("text/event-stream", [sub, idle = 0](std::size_t, httplib::DataSink& sink) mutable {
                auto n = sub->pop(std::chrono::milliseconds(250));
                std::string chunk;
                if (n) {
                    idle = 0;
                    chunk = "data: " + std::to_string(n->timestamp_ms) + " " + n->value.display() + "\n\n";
                } else if (sub->closed()) {
                    sink.done();
                    return true;
                } else if (++idle % 20 == 0) {
                    chunk = ": keepalive\n\n";
                }
                return chunk.empty() || sink.write(chunk.data(), chunk.size());
            });
        });
    }
};

RestApi::RestApi(DmServer& server, const auth::TokenService& tokens, const auth::AuthService* auth,
                 http::HttpOptions options)
    : impl_(std::make_unique<Impl>(server, tokens, auth, options))
{
}

RestApi::~RestApi() { stop(); }

void RestApi::start() { impl_->runner.start(); }
void RestApi::stop() { impl_->runner.stop(); }
std::uint16_t RestApi::port() const { return impl_->runner.port(); }

} // namespace lm2m::dm
