#pragma once

#include <stdexcept>
#include <string>

namespace mcad {

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError / bad usage -> 1, DataError family -> 2, NumericError -> 3.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value-level precondition violations (bad label, empty batch, degenerate box, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed text inputs (manifest rows, config lines, metrics CSV).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failures (missing, unreadable, truncated files).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown key, non-positive field, unsupported backend).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or diverging training.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mcad
