#pragma once

#include <stdexcept>
#include <string>

namespace herdsim {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / input validation problems. The CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Failures that occur while running an otherwise valid configuration.
// The CLI maps these to exit code 3.
class RuntimeFailure : public Error {
public:
    using Error::Error;
};

struct EmptyRowError final : ConfigError { using ConfigError::ConfigError; };
struct NegativeWeightError final : ConfigError { using ConfigError::ConfigError; };
struct IndexOutOfRangeError final : ConfigError { using ConfigError::ConfigError; };
struct AlphaOutOfRangeError final : ConfigError { using ConfigError::ConfigError; };
struct DimensionMismatchError final : ConfigError { using ConfigError::ConfigError; };
struct ValidationError final : ConfigError { using ConfigError::ConfigError; };
struct UnknownKeyError final : ConfigError { using ConfigError::ConfigError; };
struct ParseError final : ConfigError { using ConfigError::ConfigError; };

struct NotIrreducibleError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct NoConvergenceError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct ConnectivityFailureError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct NoEdgesError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct NeighborhoodTooLargeError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct TooLargeError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct TooShortError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct NoResolvedTrialsError final : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };

} // namespace herdsim
