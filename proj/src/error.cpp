#include "gclust/error.hpp"

namespace gclust {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::parse: return "parse";
        case ErrorKind::out_of_range: return "out_of_range";
        case ErrorKind::io: return "io";
        case ErrorKind::numerical: return "numerical";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace gclust
