#pragma once

#include <stdexcept>
#include <string>

namespace quanto {

// Malformed or unusable input data (files, rows, series).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fewer observations than an operation needs.
class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

// Data that admits no estimate in the open parameter space (zero variance, |rho| = 1).
class DegenerateDataError : public DataError {
public:
    using DataError::DataError;
};

// Option price outside the no-arbitrage band, so no implied volatility exists.
class NoSolutionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace quanto
