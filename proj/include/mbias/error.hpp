#pragma once

#include <stdexcept>
#include <string>

namespace mbias {

/// Malformed or inconsistent input data (parse errors, duplicate ids,
/// dangling references, invariant violations). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistic is not defined for the given input (e.g. alpha with zero
/// expected disagreement).
class UndefinedStatistic : public DataError {
public:
    using DataError::DataError;
};

/// Failure while training or evaluating a model. Maps to CLI exit code 3.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mbias
