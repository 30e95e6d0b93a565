#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

/// Malformed or inconsistent input (files, signatures, unknown nodes).
/// CLI exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resource limits: outcome-space overflow, iteration budgets exhausted.
/// CLI exit code 3.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Query is well-formed but undefined at the given inputs, e.g. intervening
/// at a zero-probability value or statistics no quantum model can produce.
/// CLI exit code 4.
struct UndefinedQueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Graph shape outside what a closed-form rule covers.
/// CLI exit code 5.
struct UnsupportedShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qcm
