#pragma once

#include <stdexcept>
#include <string>

namespace gmfg {

// Caller violated a documented precondition (mismatched spaces, bad weights).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model produced something outside its contract (bad transition row,
// non-finite reward).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested exact enumeration is beyond the configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmfg
