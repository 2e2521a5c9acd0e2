#pragma once

// Fixed-layout mini-CoAP message:
//
//   byte 0      version (4 bits, = 1) << 4 | type
//   byte 1      code
//   bytes 2-3   message id, big-endian
//   byte 4      token length (0-8), then the token
//   1 byte      observe flag
//   1 byte      path length, then the UTF-8 path (may carry a ?query)
//   2 bytes     payload length, big-endian, then the payload

#include "lm2m/util/bytes.hpp"

#include <optional>
#include <string>

namespace lm2m::wire {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kMaxToken = 8;
inline constexpr std::size_t kMaxPath = 255;
inline constexpr std::size_t kMaxPayload = 65535;

enum class MessageType : std::uint8_t { Con = 0, Non = 1, Ack = 2, Rst = 3 };

enum class Code : std::uint8_t {
    Empty = 0x00,
    Get = 0x01,
    Post = 0x02,
    Put = 0x03,
    Delete = 0x04,
    Created = 0x41,
    Deleted = 0x42,
    Changed = 0x44,
    Content = 0x45,
    Unauthorized = 0x81,
    NotFound = 0x84,
    MethodNotAllowed = 0x85,
    BadRequest = 0x88,
};

bool is_known_code(std::uint8_t code);
bool is_request(Code c);
bool is_success(Code c);
std::string_view to_string(Code c);

enum class Observe : std::uint8_t { None = 0, Register = 1, Deregister = 2 };

struct Message {
    MessageType type = MessageType::Con;
    Code code = Code::Get;
    std::uint16_t message_id = 0;
    Bytes token;
    Observe observe = Observe::None;
    std::string path;
    Bytes payload;

    bool operator==(const Message&) const = default;

    /// Path without the query part.
    std::string_view path_only() const;
    /// Value of `key` in the ?query part, if present.
    std::optional<std::string> query(std::string_view key) const;
};

/// Throws WireError{TokenTooLong | PathTooLong | PayloadTooLong}.
Bytes encode(const Message& msg);

/// Total over arbitrary input: returns a valid Message or throws WireError.
Message decode(ByteView data);

/// Piggybacked response sharing the request's id and token.
Message make_response(const Message& request, Code code, Bytes payload = {});

} // namespace lm2m::wire
