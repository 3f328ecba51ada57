#pragma once

#include <stdexcept>
#include <string>

namespace mints {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixing scalar and vector feedback within one dataset.
class KindMismatchError : public Error {
 public:
  using Error::Error;
};

/// Every candidate optimum has zero profile likelihood.
class EmptyPosteriorError : public Error {
 public:
  using Error::Error;
};

/// A convex program could not be solved (infeasible, iteration cap, bad input).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A rejection sampler exhausted its attempt budget.
class SamplerExhaustedError : public Error {
 public:
  SamplerExhaustedError(const std::string& what, double acceptance_estimate)
      : Error(what), acceptance_estimate_(acceptance_estimate) {}
  double acceptance_estimate() const { return acceptance_estimate_; }

 private:
  double acceptance_estimate_;
};

}  // namespace mints
