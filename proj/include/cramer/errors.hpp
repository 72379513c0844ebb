#pragma once

#include <stdexcept>
#include <string>

namespace cramer {

// Argument outside the mathematical domain of an operation (N < 3, x <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A sampled state has fewer members than the caller asked for; resample with
// a larger cutoff.
class InsufficientStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The caller picked the wrong series for the character (C-series needs a
// non-principal character).
class WrongSeriesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cramer
