#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace stes {

// Base class for all errors raised by the library. Callers that only care
// about "something about the inputs was wrong" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a documented precondition (bad parameters, bad window,
// malformed files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Storage with a zero power bound has no finite charge/discharge duration.
class UndefinedDurationError : public Error {
 public:
  using Error::Error;
};

// Leakage caps the reachable level below the usable capacity.
class UnreachableCapacityError : public Error {
 public:
  using Error::Error;
};

// Relative gap against a zero-cost benchmark.
class UndefinedGapError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown inside the solver (singular basis that could not be
// repaired, cycling beyond the safeguard).
class SolverError : public Error {
 public:
  using Error::Error;
};

// A model with no feasible point. For rolling runs `day` is the 0-based day
// of the window that failed.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what,
                           std::optional<std::size_t> day = std::nullopt)
      : Error(what), day_(day) {}
  std::optional<std::size_t> day() const { return day_; }

 private:
  std::optional<std::size_t> day_;
};

// Iteration, node or time limit hit before a proven optimum.
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace stes
