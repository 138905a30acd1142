#pragma once

#include <utility>

#include "blockprec/sym_matrix.hpp"

namespace blockprec {

struct LogDetResult {
  double logdet = 0.0;
  bool success = false;  // true iff the matrix is positive-definite
};

// Cholesky with strict pivots. success=false when any pivot is <= 0; logdet
// is only meaningful when success is true.
LogDetResult cholesky_logdet(const SymMatrix& x);

bool is_pd(const SymMatrix& x);

// det(X) as a polynomial in the single entry X_ij (= X_ji): quadratic for
// i != j, linear (a == 0) for i == j. Coefficients are for the shifted
// variable s = t - x(i,j), i.e. det = a s^2 + b s + c, which keeps the fit
// well conditioned around the current value.
struct DetPoly {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double center = 0.0;  // the current entry value the polynomial is shifted by
  double eval(double t) const {
    const double s = t - center;
    return (a * s + b) * s + c;
  }
};

DetPoly det_poly(const SymMatrix& x, int i, int j);

// Open interval (lo, hi) of values t such that X with X_ij = X_ji = t is PD.
// Diagonal entries: lo finite, hi = +inf. Off-diagonal: both finite.
struct PdInterval {
  double lo;
  double hi;
};

PdInterval pd_interval(const SymMatrix& x, int i, int j);

// (N/2) * (log det Omega - trace(Omega S) - D log 2 pi): Gaussian likelihood
// of N centered rows with precision Omega, via the scatter matrix.
double gaussian_loglik(const SampleStats& stats, const SymMatrix& omega);

}  // namespace blockprec
