#ifndef POLYFRONT_ERRORS_HPP_
#define POLYFRONT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace polyfront {

// Argument outside [0,1] or otherwise outside the domain of a map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A flux family that breaks the S-shape conditions.
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (off-grid state, bad rect, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An internal invariant failed; this is a bug or a numerical breakdown.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The event-count safeguard tripped.
class SafeguardAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polyfront

#endif  // POLYFRONT_ERRORS_HPP_
