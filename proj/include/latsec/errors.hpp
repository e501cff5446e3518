#pragma once

#include <stdexcept>
#include <string>

namespace latsec {

// Raised when a requested tolerance cannot be certified with the data at
// hand (series truncated too early, tail bound not applicable, ...).
// The message says what to regenerate or enlarge.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a hard computational budget is exhausted. Partial results are
// never returned: completeness is part of the contract of the operations
// that enforce budgets.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by basis conversions when the target representation does not exist.
struct ConversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for inconsistent wiretap configurations (non-nested lattice pairs,
// contradictory rates, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace latsec
