#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace haartrend {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data problems: malformed files, invalid series, bad shapes.
class DataFault : public Error {
public:
    using Error::Error;
};

// Numerical failures: rank deficiency, empty kernel windows, non-finite results.
class NumericalFault : public Error {
public:
    using Error::Error;
};

// Invalid parameters or rule definitions.
class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidGridError : public DataFault {
public:
    using DataFault::DataFault;
};

class IndexError : public DataFault {
public:
    using DataFault::DataFault;
};

class InputError : public DataFault {
public:
    using DataFault::DataFault;
};

/// Coefficient keys do not match the index set of the sample size.
class StructuralError : public DataFault {
public:
    using DataFault::DataFault;
};

class DataError : public DataFault {
public:
    using DataFault::DataFault;
};

class ParseError : public DataFault {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataFault("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public DataFault {
public:
    using DataFault::DataFault;
};

class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A custom shrinkage rule violates the thresholding contract.
class RuleError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class RankError : public NumericalFault {
public:
    RankError(const std::string& what, double condition)
        : NumericalFault(what + " (condition estimate " + std::to_string(condition) + ")"),
          condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class EstimationError : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

class EvaluationError : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

}  // namespace haartrend
