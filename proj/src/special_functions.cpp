#include "blockprec/special_functions.hpp"

#include <cmath>

#include "blockprec/errors.hpp"

namespace blockprec {

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("log_gamma: argument must be positive");
  }
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("digamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^(2n))
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = -1.0 / 132.0;
  series = series * inv2 + 1.0 / 240.0;
  series = series * inv2 - 1.0 / 252.0;
  series = series * inv2 + 1.0 / 120.0;
  series = series * inv2 - 1.0 / 12.0;
  series *= inv2;
  return acc + std::log(x) - 0.5 * inv + series;
}

double log_multigamma(double a, int d) {
  if (d < 1 || !(a > 0.5 * (d - 1))) {
    throw DomainError("log_multigamma: need a > (d-1)/2");
  }
  constexpr double log_pi = 1.1447298858494001741434273513531;
  double out = 0.25 * d * (d - 1) * log_pi;
  for (int j = 0; j < d; ++j) {
    out += log_gamma(a - 0.5 * j);
  }
  return out;
}

}  // namespace blockprec
