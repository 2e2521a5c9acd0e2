#pragma once

#include <stdexcept>
#include <string>

namespace lm2m::wire {

enum class WireErrc {
    Truncated,
    BadVersion,
    BadCode,
    BadType,
    BadToken,
    BadObserve,
    BadPath,
    BadValue,
    TrailingBytes,
    PathTooLong,
    PayloadTooLong,
    TokenTooLong,
    BadTag,
};

std::string_view to_string(WireErrc c);

class WireError : public std::runtime_error {
public:
    WireError(WireErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    explicit WireError(WireErrc code) : WireError(code, std::string(to_string(code))) {}
    WireErrc code() const { return code_; }

private:
    WireErrc code_;
};

} // namespace lm2m::wire
