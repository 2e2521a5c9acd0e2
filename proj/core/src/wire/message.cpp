#include "lm2m/wire/message.hpp"

#include "lm2m/wire/errors.hpp"

namespace lm2m::wire {

bool is_known_code(std::uint8_t code)
{
    switch (static_cast<Code>(code)) {
    case Code::Empty:
    case Code::Get:
    case Code::Post:
    case Code::Put:
    case Code::Delete:
    case Code::Created:
    case Code::Deleted:
    case Code::Changed:
    case Code::Content:
    case Code::Unauthorized:
    case Code::NotFound:
    case Code::MethodNotAllowed:
    case Code::BadRequest: return true;
    }
    return false;
}

bool is_request(Code c) { return c == Code::Get || c == Code::Post || c == Code::Put || c == Code::Delete; }

bool is_success(Code c) { return (static_cast<std::uint8_t>(c) >> 5) == 2; }

std::string_view to_string(Code c)
{
    switch (c) {
    case Code::Empty: return "0.00 Empty";
    case Code::Get: return "GET";
    case Code::Post: return "POST";
    case Code::Put: return "PUT";
    case Code::Delete: return "DELETE";
    case Code::Created: return "2.01 Created";
    case Code::Deleted: return "2.02 Deleted";
    case Code::Changed: return "2.04 Changed";
    case Code::Content: return "2.05 Content";
    case Code::Unauthorized: return "4.01 Unauthorized";
    case Code::NotFound: return "4.04 Not Found";
    case Code::MethodNotAllowed: return "4.05 Method Not Allowed";
    case Code::BadRequest: return "4.08 Bad Request";
    }
    return "unknown";
}

std::string_view Message::path_only() const
{
    std::string_view p(path);
    return p.substr(0, p.find('?'));
}

std::optional<std::string> Message::query(std::string_view key) const
{
    const auto q = path.find('?');
    if (q == std::string::npos) return std::nullopt;
    std::string_view rest = std::string_view(path).substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const auto pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == key) {
            return eq == std::string_view::npos ? std::string() : std::string(pair.substr(eq + 1));
        }
        if (amp == std::string_view::npos) break;
        rest = rest.substr(amp + 1);
    }
    return std::nullopt;
}

Bytes encode(const Message& msg)
{
    if (msg.token.size() > kMaxToken) throw WireError(WireErrc::TokenTooLong);
    if (msg.path.size() > kMaxPath) throw WireError(WireErrc::PathTooLong);
    if (msg.payload.size() > kMaxPayload) throw WireError(WireErrc::PayloadTooLong);

    Bytes out;
    out.reserve(8 + msg.token.size() + msg.path.size() + msg.payload.size());
    out.push_back(static_cast<std::uint8_t>((kVersion << 4) | static_cast<std::uint8_t>(msg.type)));
    out.push_back(static_cast<std::uint8_t>(msg.code));
    out.push_back(static_cast<std::uint8_t>(msg.message_id >> 8));
    out.push_back(static_cast<std::uint8_t>(msg.message_id));
    out.push_back(static_cast<std::uint8_t>(msg.token.size()));
    out.insert(out.end(), msg.token.begin(), msg.token.end());
    out.push_back(static_cast<std::uint8_t>(msg.observe));
    out.push_back(static_cast<std::uint8_t>(msg.path.size()));
    out.insert(out.end(), msg.path.begin(), msg.path.end());
    out.push_back(static_cast<std::uint8_t>(msg.payload.size() >> 8));
    out.push_back(static_cast<std::uint8_t>(msg.payload.size()));
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

Message decode(ByteView data)
{
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (data.size() - pos < n) throw WireError(WireErrc::Truncated);
    };

    need(5);
    Message msg;
    if ((data[0] >> 4) != kVersion) throw WireError(WireErrc::BadVersion);
    const std::uint8_t type = data[0] & 0x0f;
    if (type > 3) throw WireError(WireErrc::BadType);
    msg.type = static_cast<MessageType>(type);
    if (!is_known_code(data[1])) throw WireError(WireErrc::BadCode);
    msg.code = static_cast<Code>(data[1]);
    msg.message_id = static_cast<std::uint16_t>((data[2] << 8) | data[3]);
    const std::size_t token_len = data[4];
    pos = 5;
    if (token_len > kMaxToken) throw WireError(WireErrc::BadToken);
    need(token_len);
    msg.token.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                     data.begin() + static_cast<std::ptrdiff_t>(pos + token_len));
    pos += token_len;

    need(2);
    if (data[pos] > static_cast<std::uint8_t>(Observe::Deregister)) throw WireError(WireErrc::BadObserve);
    msg.observe = static_cast<Observe>(data[pos]);
    const std::size_t path_len = data[pos + 1];
    pos += 2;
    need(path_len);
    auto path = data.subspan(pos, path_len);
    if (!is_valid_utf8(path)) throw WireError(WireErrc::BadPath, "path is not valid UTF-8");
    msg.path.assign(path.begin(), path.end());
    pos += path_len;

    need(2);
    const std::size_t payload_len = (std::size_t{data[pos]} << 8) | data[pos + 1];
    pos += 2;
    need(payload_len);
    msg.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                       data.begin() + static_cast<std::ptrdiff_t>(pos + payload_len));
    pos += payload_len;
    if (pos != data.size()) throw WireError(WireErrc::TrailingBytes);
    return msg;
}

Message make_response(const Message& request, Code code, Bytes payload)
{
    Message r;
    r.type = request.type == MessageType::Con ? MessageType::Ack : MessageType::Non;
    r.code = code;
    r.message_id = request.message_id;
    r.token = request.token;
    r.payload = std::move(payload);
    return r;
}

} // namespace lm2m::wire
