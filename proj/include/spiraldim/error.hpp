#pragma once

#include <stdexcept>
#include <string>

namespace spiraldim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
/// The CLI maps these to exit code 1.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The computation itself failed: stiffness, sub-resolution, mixed signs.
/// The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Sampling budget ran out before the requested stopping condition.
class BudgetError : public PreconditionError {
 public:
  BudgetError(const std::string& what, double reached, std::size_t required = 0)
      : PreconditionError(what), reached_(reached), required_(required) {}

  /// Parameter or radius reached when the budget was exhausted.
  double reached() const noexcept { return reached_; }
  /// Minimum budget known to be required, 0 if unknown.
  std::size_t required() const noexcept { return required_; }

 private:
  double reached_;
  std::size_t required_;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Successive Poincare differences d(r_n) not all negative.
class MixedSignError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnderSampledError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

[[noreturn]] void fail_precondition(const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail_precondition(what);
}

}  // namespace spiraldim
