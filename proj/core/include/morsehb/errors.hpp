#pragma once

#include <stdexcept>
#include <string>

namespace morsehb {

/// Input document is not syntactically/structurally well formed.
struct parse_error : std::runtime_error {
    int line = 0;
    int column = 0;
    parse_error(const std::string& msg, int line_ = 0, int column_ = 0)
        : std::runtime_error(msg), line(line_), column(column_) {}
};

/// A documented precondition of an operation was violated by the caller.
struct precondition_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// Integer arithmetic left the representable range. Never wraps silently.
struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical procedure refused to produce a result (quorum failure,
/// unresolved trajectory transitions, step-size underflow, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace morsehb
