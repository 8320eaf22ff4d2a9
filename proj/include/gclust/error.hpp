#pragma once

#include <stdexcept>
#include <string>

namespace gclust {

enum class ErrorKind {
    invalid_argument,  // precondition violated by the caller
    parse,             // malformed text input
    out_of_range,      // value outside a declared domain (e.g. event time past the horizon)
    io,                // file missing or unwritable
    numerical,         // degenerate numerics (empty cluster, zero target, ...)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace gclust
