#pragma once

#include <stdexcept>
#include <string>

namespace blockprec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller-supplied values: non-finite entries, dimension mismatches,
// malformed partitions.
struct InvalidInputError : Error {
  using Error::Error;
};

// Mathematically out-of-domain requests (non-PD matrix where PD is required,
// nonpositive argument to log_gamma, ...).
struct DomainError : Error {
  using Error::Error;
};

// pd_interval: the matrix cannot be completed to a PD matrix by any value of
// the requested entry.
struct NoIntervalError : Error {
  using Error::Error;
};

// exact 2D normalizer at the removable-singularity line 2*lambda_1 == lambda_0.
struct SingularityError : Error {
  using Error::Error;
};

// exact 2D normalizer requires lambda_d == lambda_1.
struct UnsupportedConfigError : Error {
  using Error::Error;
};

// importance sampling produced no usable weights.
struct EstimationFailedError : Error {
  using Error::Error;
};

struct NotSplittableError : Error {
  using Error::Error;
};

// standardize() hit one or more zero-variance columns; message lists them.
struct DegenerateColumnError : Error {
  using Error::Error;
};

// CSV ingestion failure; message carries the 1-based file line.
struct ParseError : Error {
  using Error::Error;
};

// A truncated-distribution draw landed outside its interval even after a
// stabilized inversion. Callers may retry with a nudged interval.
struct ResampleAtBoundaryError : Error {
  using Error::Error;
};

}  // namespace blockprec
