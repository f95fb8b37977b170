#pragma once

#include <stdexcept>
#include <string>

namespace banditlab {

/// Invalid or inconsistent configuration (bad prior, kind mismatch, bad file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or a failed factorization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown action or parameter id.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Instance too large for an exhaustive routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Argument of the wrong kind (e.g. a real-valued class where a binary one is needed).
class TypeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition (empty action set, unavailable action).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace banditlab
