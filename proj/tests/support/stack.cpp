#include "stack.hpp"

#include "lm2m/util/crypto.hpp"

#include <httplib.h>

#include <thread>

namespace lm2m::testing {

ledger::ChainConfig fast_chain()
{
    auto c = ledger::ChainConfig::desk();
    c.difficulty_bits = 4;
    c.block_interval_ms = 20;
    return c;
}

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds timeout, std::chrono::milliseconds poll)
{
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        if (pred())
            return true;
        std::this_thread::sleep_for(poll);
    }
    return pred();
}

Bytes secret(std::uint8_t fill, std::size_t n) { return Bytes(n, fill); }

nlohmann::json HttpResult::json() const { return nlohmann::json::parse(body); }

Http::Http(std::uint16_t port, std::string host) : host_(std::move(host)), port_(port) {}

HttpResult Http::request(const std::string& method, const std::string& path, const std::string& body,
                         const std::string& token) const
{
    httplib::Client c(host_, port_);
    c.set_read_timeout(30, 0);
    httplib::Headers headers;
    if (!token.empty())
        headers.emplace("Authorization", "Bearer " + token);
    httplib::Result r;
    if (method == "GET")
        r = c.Get(path, headers);
    else if (method == "DELETE")
        r = c.Delete(path, headers);
    else if (method == "POST")
        r = c.Post(path, headers, body, "application/json");
    else if (method == "PUT")
        r = c.Put(path, headers, body, "application/json");
    else
        throw std::invalid_argument("method " + method);
    if (!r)
        throw std::runtime_error("http " + method + " " + path + ": " + httplib::to_string(r.error()));
    return HttpResult{r->status, r->body, r->get_header_value("Content-Type")};
}

HttpResult Http::get(const std::string& p, const std::string& t) const { return request("GET", p, "", t); }
HttpResult Http::del(const std::string& p, const std::string& t) const { return request("DELETE", p, "", t); }
HttpResult Http::post(const std::string& p, const std::string& b, const std::string& t) const
{
    return request("POST", p, b, t);
}
HttpResult Http::put(const std::string& p, const std::string& b, const std::string& t) const
{
    return request("PUT", p, b, t);
}

Stack::Stack(StackOptions options)
    : options_(options),
      ledger_(contracts::open_ledger(ledger::Ledger::Options{options.chain, std::nullopt, false, {}})),
      submitter_(*ledger_, "mgmt"),
      tokens_(crypto::random_bytes(auth::kSecretSize)),
      auth_(*ledger_, tokens_, options.login_floor),
      directory_(std::make_shared<contracts::LedgerClientDirectory>(*ledger_))
{
    ledger_->start_auto_mining();
    auto loopback = net::SockAddr::parse("127.0.0.1:0");
    bs_ = std::make_unique<bootstrap::BootstrapServer>(directory_,
                                                       bootstrap::BootstrapServerOptions{loopback, options.endpoint, 0});
    dm::DmServerOptions dm_opts;
    dm_opts.bind = loopback;
    dm_opts.endpoint = options.endpoint;
    dm_opts.sweep_interval = options.sweep_interval;
    dm_ = std::make_unique<dm::DmServer>(directory_, dm_opts);
    bs_->start();
    dm_->start();
    if (options.http) {
        http::HttpOptions h{"127.0.0.1", 0, "*"};
        api_ = std::make_unique<dm::RestApi>(*dm_, tokens_, &auth_, h);
        mgmt_ = std::make_unique<mgmt::MgmtService>(*ledger_, submitter_, auth_, h);
        api_->start();
        mgmt_->start();
    }
}

Stack::~Stack()
{
    if (mgmt_)
        mgmt_->stop();
    if (api_)
        api_->stop();
    dm_->stop();
    bs_->stop();
    ledger_->stop();
}

std::string Stack::bootstrap_uri() const { return "coap://" + bs_->local_addr().to_string(); }
std::string Stack::server_uri() const { return "coap://" + dm_->local_addr().to_string(); }

contracts::ClientRecord Stack::make_record(const std::string& endpoint, std::uint8_t fill) const
{
    return contracts::ClientRecord{endpoint,          bootstrap_uri(),  server_uri(),
                                   endpoint + "-bs",  secret(fill, 32), endpoint + "-dm",
                                   secret(static_cast<std::uint8_t>(fill + 1), 32)};
}

ledger::Receipt Stack::submit(ledger::Transaction tx)
{
    auto id = submitter_.submit(std::move(tx));
    auto r = ledger_->wait_for_receipt(id, std::chrono::seconds(60));
    if (!r)
        throw std::runtime_error("transaction not mined in time");
    return *r;
}

ledger::Receipt Stack::add_client(const contracts::ClientRecord& record)
{
    return submit(contracts::tx::add_client(record));
}

ledger::Receipt Stack::add_user(const std::string& username, const std::string& password, contracts::Role role)
{
    return submit(contracts::tx::add_user(contracts::make_user(username, username + "@example.org", password, role)));
}

std::string Stack::token(contracts::Role role, const std::string& sub) const { return tokens_.issue(sub, role); }

sim::SimConfig Stack::sim_config(const contracts::ClientRecord& record) const
{
    sim::SimConfig c;
    c.endpoint = record.endpoint;
    c.bootstrap_uri = record.bootstrap_uri;
    c.psk_identity = record.bootstrap_psk_identity;
    c.psk_secret = record.bootstrap_psk_secret;
    c.bind = "127.0.0.1:0";
    c.endpoint_options = wire::EndpointOptions{std::chrono::milliseconds(500), 4, 1};
    c.retry_base = std::chrono::milliseconds(200);
    c.retry_cap = std::chrono::milliseconds(2000);
    return c;
}

} // namespace lm2m::testing
