#pragma once

namespace blockprec {

// log Gamma(x), x > 0. Relative error well under 1e-10 on [1e-3, 1e6].
double log_gamma(double x);

// Digamma psi(x), x > 0. Recurrence up to x >= 10, then the Bernoulli
// asymptotic series through x^-10.
double digamma(double x);

// log of the multivariate gamma function Gamma_d(a), a > (d-1)/2.
double log_multigamma(double a, int d);

}  // namespace blockprec
