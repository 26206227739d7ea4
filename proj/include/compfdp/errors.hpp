#pragma once

#include <stdexcept>
#include <string>

namespace compfdp {

/// A parameter or input value lies outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed, truncated or tampered input data (score files, table files).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A table file declares a format version this build does not understand.
class VersionError : public DataError {
public:
    using DataError::DataError;
};

/// Missing or insufficient precomputed quantile tables.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace compfdp
