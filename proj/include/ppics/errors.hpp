#pragma once

#include <stdexcept>
#include <string>

namespace ppics {

// Error taxonomy shared by the library and the CLI exit codes:
// ConfigError -> 2, DataError -> 3, NumericalError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid options, impossible budgets, out-of-range parameters.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed or non-finite input records. Carries a 1-based position
// (record ordinal or file line) when known; 0 means unknown.
struct DataError : Error {
    explicit DataError(const std::string& msg, long long position = 0)
        : Error(msg), position(position) {}
    long long position;
};

// Quadrature non-convergence and similar numerical failures.
struct NumericalError : Error {
    using Error::Error;
};

// Recoverable "not enough observations yet" conditions. Callers that
// stream data treat this as "interval not defined at this n".
struct InsufficientData : Error {
    using Error::Error;
};

// Constant predictions: the power-tuning coefficient is undefined.
struct DegeneratePredictor : Error {
    using Error::Error;
};

// A zero scale estimate where a standardized mean is required.
struct DegenerateScale : Error {
    using Error::Error;
};

// Unlabelled pool smaller than the labelled sample where a ratio
// n/N <= 1 is required.
struct InvalidRatio : Error {
    using Error::Error;
};

}  // namespace ppics
