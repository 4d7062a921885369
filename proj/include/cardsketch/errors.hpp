#pragma once

#include <stdexcept>
#include <string>

namespace cardsketch {

// Raised when an estimator's input state is degenerate (no zero cells left).
// `bound` carries the largest value the estimator could still have reported.
class saturation_error : public std::runtime_error {
 public:
  enum class Scope { sketch, user, array };

  saturation_error(Scope scope, double bound, const std::string& what)
      : std::runtime_error(what), scope_(scope), bound_(bound) {}

  Scope scope() const { return scope_; }
  double bound() const { return bound_; }

 private:
  Scope scope_;
  double bound_;
};

// Raised for array sizes a formula has no constant for (e.g. alpha below 16).
class unsupported_size_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an approximation is evaluated outside its validity regime and
// the caller did not explicitly override the guard.
class out_of_regime_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cardsketch
