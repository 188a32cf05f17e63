#pragma once

#include <stdexcept>
#include <string>

namespace tidp {

/// Malformed or incomplete input schema (missing column, bad header). CLI exit code 2.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required upstream cache or file is absent. CLI exit code 3.
class MissingArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure (singular system, non-finite value). CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or dimension mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Text could not be encoded (empty after sanitization).
class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough data to run a training procedure.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rank-deficient least-squares system; carries the offending column name.
class SingularityError : public NumericError {
public:
    SingularityError(const std::string& column, const std::string& message)
        : NumericError(message), column_(column) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

}  // namespace tidp
