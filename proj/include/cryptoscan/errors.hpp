#pragma once

#include <stdexcept>
#include <string>

namespace cryptoscan {

// Exit-code mapping: UsageError -> 1, DataError subtypes -> 2, anything else -> 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
    using DataError::DataError;
};

struct ValidationError : DataError {
    using DataError::DataError;
};

struct IoError : DataError {
    using DataError::DataError;
};

struct MissingSample : DataError {
    using DataError::DataError;
};

struct EmptyCorpus : DataError {
    using DataError::DataError;
};

struct DegenerateLabels : DataError {
    using DataError::DataError;
};

struct DegenerateFeatures : DataError {
    using DataError::DataError;
};

struct InsufficientData : DataError {
    using DataError::DataError;
};

struct InsufficientBaselineFeatures : DataError {
    using DataError::DataError;
};

struct DimensionMismatch : DataError {
    using DataError::DataError;
};

struct TooManyFeatures : DataError {
    using DataError::DataError;
};

struct SplitMismatch : DataError {
    using DataError::DataError;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cryptoscan
