#pragma once

#include <stdexcept>
#include <string>

namespace sascor {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad row, non-numeric field, unknown format).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates a documented invariant or
// precondition (non-increasing shifts, empty mode set, band outside
// spectrum support, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Failure inside a numerical engine: step-size precondition violated,
// density-matrix invariant breached, zero mean occupation, ...
struct NumericsError : Error {
    using Error::Error;
};

}  // namespace sascor
