#pragma once

#include <stdexcept>
#include <string>

namespace pmf {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid game description.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Forecaster/experiment configuration that cannot be honoured, e.g. a
// variant that does not match the game's feedback structure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A signal-distribution vector that is not in the feasible set F.
class InfeasibleSignalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmf
