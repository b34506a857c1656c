#pragma once

#include <stdexcept>
#include <string>

namespace mtlkd {

// A caller broke an operation's precondition (masked action, bad index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed or unreadable input data (datasets, benchmark files, checkpoints).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or command-line arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtlkd
