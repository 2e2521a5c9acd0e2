#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace lm2m::http {

struct HttpOptions {
    std::string host = "0.0.0.0";
    /// 0 picks an ephemeral port.
    std::uint16_t port = 0;
    /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
    std::string cors_origin = "*";
};

} // namespace lm2m::http
