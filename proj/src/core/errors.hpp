#pragma once

#include <stdexcept>

namespace cheegerpack {

/// Config/input validation failure; messages name the offending key.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Optimizer could not obtain a finite starting value.
struct InitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cheegerpack
