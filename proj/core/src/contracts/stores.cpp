#include "lm2m/contracts/stores.hpp"

#include "lm2m/contracts/records.hpp"

namespace lm2m::contracts {

using ledger::ContractErrc;
using ledger::ContractError;
using ledger::Storage;

namespace {

[[noreturn]] void revert(const std::string& reason) { throw ContractError(ContractErrc::Revert, reason); }

std::string seq_key(std::string_view prefix, std::uint64_t seq)
{
    codec::Writer w;
    w.u64(seq);
    std::string k(prefix);
    k.append(reinterpret_cast<const char*>(w.data().data()), w.size());
    return k;
}

std::uint64_t read_u64(Storage& s, std::string_view key)
{
    auto v = s.get(key);
    if (!v) return 0;
    codec::Reader r(*v);
    return r.u64();
}

void write_u64(Storage& s, std::string_view key, std::uint64_t value)
{
    codec::Writer w;
    w.u64(value);
    s.put(key, w.data());
}

Bytes encode_bool(bool v)
{
    return Bytes{static_cast<std::uint8_t>(v ? 1 : 0)};
}

/// Value layout for keyed entries: insertion sequence followed by the record.
template <typename Record>
std::pair<std::uint64_t, Record> decode_entry(ByteView value)
{
    codec::Reader r(value);
    const auto seq = r.u64();
    auto record = Record::decode(r);
    return {seq, std::move(record)};
}

template <typename Record>
Bytes encode_entry(std::uint64_t seq, const Record& record)
{
    codec::Writer w;
    w.u64(seq);
    record.encode(w);
    return w.take();
}

// ---- ClientStore ---------------------------------------------------------

std::string client_key(std::string_view endpoint) { return "c/" + std::string(endpoint); }

Bytes add_client(codec::Reader& args, Storage& s)
{
    const auto endpoint = args.str();
    const auto record = ClientRecord::decode(args);
    args.expect_end();
    if (auto err = record.validation_error()) revert("invalid client record: " + *err);
    if (endpoint != record.endpoint) revert("endpoint does not match record");
    if (s.contains(client_key(endpoint))) revert("client exists");

    const auto seq = read_u64(s, "seq") + 1;
    write_u64(s, "seq", seq);
    s.put(client_key(endpoint), encode_entry(seq, record));
    s.put(seq_key("o/", seq), as_view(endpoint));
    return {};
}

Bytes get_client(codec::Reader& args, Storage& s)
{
    const auto endpoint = args.str();
    args.expect_end();
    auto v = s.get(client_key(endpoint));
    if (!v) throw ContractError(ContractErrc::NotFound, "client not found");
    auto [seq, record] = decode_entry<ClientRecord>(*v);
    return record.serialize();
}

Bytes get_all_clients(codec::Reader& args, Storage& s)
{
    args.expect_end();
    std::vector<std::string> order;
    s.scan("o/", [&](std::string_view, ByteView v) {
        order.emplace_back(v.begin(), v.end());
        return true;
    });
    codec::Writer w;
    w.u32(static_cast<std::uint32_t>(order.size()));
    for (const auto& endpoint : order) {
        auto v = s.get(client_key(endpoint));
        if (!v) throw ContractError(ContractErrc::NotFound, "client index inconsistent");
        auto [seq, record] = decode_entry<ClientRecord>(*v);
        w.str(endpoint);
        record.encode(w);
    }
    return w.take();
}

Bytes remove_client(codec::Reader& args, Storage& s)
{
    const auto endpoint = args.str();
    args.expect_end();
    auto v = s.get(client_key(endpoint));
    if (!v) revert("client not found");
    auto [seq, record] = decode_entry<ClientRecord>(*v);
    s.erase(client_key(endpoint));
    s.erase(seq_key("o/", seq));
    return {};
}

Bytes client_exists(codec::Reader& args, Storage& s)
{
    const auto endpoint = args.str();
    args.expect_end();
    return encode_bool(s.contains(client_key(endpoint)));
}

// ---- AnomalyStore --------------------------------------------------------

Bytes add_anomaly(codec::Reader& args, Storage& s)
{
    const auto anomaly = AnomalyRecord::decode(args);
    args.expect_end();
    if (auto err = anomaly.validation_error()) revert("invalid anomaly: " + *err);
    const auto n = read_u64(s, "n");
    codec::Writer w;
    anomaly.encode(w);
    s.put(seq_key("a/", n + 1), w.data());
    write_u64(s, "n", n + 1);
    return {};
}

Bytes get_all_anomalies(codec::Reader& args, Storage& s)
{
    args.expect_end();
    codec::Writer w;
    std::uint32_t count = 0;
    codec::Writer body;
    s.scan("a/", [&](std::string_view, ByteView v) {
        body.raw(v);
        ++count;
        return true;
    });
    w.u32(count).raw(body.data());
    return w.take();
}

Bytes get_num_anomalies(codec::Reader& args, Storage& s)
{
    args.expect_end();
    codec::Writer w;
    w.u64(read_u64(s, "n"));
    return w.take();
}

Bytes anomaly_exists(codec::Reader& args, Storage& s)
{
    const auto index = args.u64();
    args.expect_end();
    return encode_bool(index >= 1 && index <= read_u64(s, "n"));
}

// ---- UserStore -----------------------------------------------------------

std::string user_key(std::string_view username) { return "u/" + std::string(username); }
std::string email_key(std::string_view email) { return "e/" + std::string(email); }

Bytes add_user(codec::Reader& args, Storage& s)
{
    const auto username = args.str();
    const auto record = UserRecord::decode(args);
    args.expect_end();
    if (auto err = record.validation_error()) revert("invalid user record: " + *err);
    if (username != record.username) revert("username does not match record");
    if (s.contains(user_key(username)) || s.contains(email_key(record.email))) revert("user exists");

    const auto seq = read_u64(s, "seq") + 1;
    write_u64(s, "seq", seq);
    s.put(user_key(username), encode_entry(seq, record));
    s.put(email_key(record.email), as_view(username));
    s.put(seq_key("o/", seq), as_view(username));
    return {};
}

Bytes get_all_users(codec::Reader& args, Storage& s)
{
    args.expect_end();
    std::vector<std::string> order;
    s.scan("o/", [&](std::string_view, ByteView v) {
        order.emplace_back(v.begin(), v.end());
        return true;
    });
    codec::Writer w;
    w.u32(static_cast<std::uint32_t>(order.size()));
    for (const auto& username : order) {
        auto v = s.get(user_key(username));
        if (!v) throw ContractError(ContractErrc::NotFound, "user index inconsistent");
        auto [seq, record] = decode_entry<UserRecord>(*v);
        w.str(username);
        record.encode(w);
    }
    return w.take();
}

Bytes update_user(codec::Reader& args, Storage& s)
{
    const auto username = args.str();
    const auto record = UserRecord::decode(args);
    args.expect_end();
    if (auto err = record.validation_error()) revert("invalid user record: " + *err);
    if (username != record.username) revert("username does not match record");
    auto v = s.get(user_key(username));
    if (!v) revert("user not found");
    auto [seq, old] = decode_entry<UserRecord>(*v);
    if (record.email != old.email) {
        if (s.contains(email_key(record.email))) revert("email in use");
        s.erase(email_key(old.email));
        s.put(email_key(record.email), as_view(username));
    }
    s.put(user_key(username), encode_entry(seq, record));
    return {};
}

Bytes validate_login(codec::Reader& args, Storage& s)
{
    const auto wildcard = args.str();
    args.expect_end();
    auto v = s.get(user_key(wildcard));
    if (!v) {
        if (auto owner = s.get(email_key(wildcard))) v = s.get(user_key(lm2m::to_string(*owner)));
    }
    if (!v) throw ContractError(ContractErrc::NotFound, "user not found");
    auto [seq, record] = decode_entry<UserRecord>(*v);
    codec::Writer w;
    record.encode(w);
    return w.take();
}

Bytes user_exists(codec::Reader& args, Storage& s)
{
    const auto username = args.str();
    args.expect_end();
    return encode_bool(s.contains(user_key(username)));
}

} // namespace

bool DispatchContract::has_function(std::string_view function) const { return lookup(function) != nullptr; }

bool DispatchContract::is_view(std::string_view function) const
{
    const auto* f = lookup(function);
    return f != nullptr && f->view;
}

Bytes DispatchContract::invoke(std::string_view function, ByteView args, Storage& storage) const
{
    const auto* f = lookup(function);
    if (f == nullptr) throw ContractError(ContractErrc::UnknownFunction, "unknown function");
    codec::Reader reader(args);
    try {
        return f->handler(reader, storage);
    } catch (const codec::DecodeError& e) {
        throw ContractError(ContractErrc::BadArguments, std::string("bad arguments: ") + e.what());
    }
}

const DispatchContract::Function* DispatchContract::lookup(std::string_view name) const
{
    for (const auto& f : functions_) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

ClientStore::ClientStore()
    : DispatchContract({
          {"addClient", false, add_client},
          {"getClient", true, get_client},
          {"getAllClients", true, get_all_clients},
          {"removeClient", false, remove_client},
          {"clientExists", true, client_exists},
      })
{
}

std::string_view ClientStore::name() const { return kClientStore; }

AnomalyStore::AnomalyStore()
    : DispatchContract({
          {"addAnomaly", false, add_anomaly},
          {"getAllAnomalies", true, get_all_anomalies},
          {"getNumAnomalies", true, get_num_anomalies},
          {"anomalyExists", true, anomaly_exists},
      })
{
}

std::string_view AnomalyStore::name() const { return kAnomalyStore; }

UserStore::UserStore()
    : DispatchContract({
          {"addUser", false, add_user},
          {"getAllUsers", true, get_all_users},
          {"updateUser", false, update_user},
          {"validateLogin", true, validate_login},
          {"userExists", true, user_exists},
      })
{
}

std::string_view UserStore::name() const { return kUserStore; }

ledger::ContractSet default_contracts()
{
    return {std::make_shared<ClientStore>(), std::make_shared<AnomalyStore>(), std::make_shared<UserStore>()};
}

} // namespace lm2m::contracts
