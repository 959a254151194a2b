#pragma once

#include <stdexcept>
#include <string>

namespace mdrkit {

// Error categories map to CLI exit codes: ConfigError -> 2, DataError -> 3,
// NumericError -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file does not match the configured schema (missing column, name
// mismatch between a model and a dataset, ...).
struct SchemaError : DataError {
    using DataError::DataError;
};

struct ParseError : DataError {
    using DataError::DataError;
};

struct EmptyDatasetError : DataError {
    using DataError::DataError;
};

struct StratificationError : DataError {
    using DataError::DataError;
};

struct ModelLoadError : DataError {
    using DataError::DataError;
};

}  // namespace mdrkit
