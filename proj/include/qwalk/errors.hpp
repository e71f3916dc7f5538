#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Invalid parameters or flag combinations. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: zero mass, zero denominators, bad series. Exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class EmptyDistributionError : public NumericalError {
  public:
    EmptyDistributionError() : NumericalError("empty distribution") {}
    explicit EmptyDistributionError(const std::string& where)
        : NumericalError("empty distribution: " + where) {}
};

} // namespace qwalk
