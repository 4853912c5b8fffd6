#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adq {

// Argument outside the mathematical domain of an operation (|x| > 1, NaN, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent configuration (λβ ≤ 1, wrong quantizer kind for a scheme, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index or length requests past the end of a stream or window.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DegeneratePairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularStepError : public std::runtime_error {
 public:
  SingularStepError(const std::string& what, int iterate)
      : std::runtime_error(what), iterate_(iterate) {}
  int iterate() const { return iterate_; }

 private:
  int iterate_;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adq
