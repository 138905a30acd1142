#pragma once

// Shared test oracles. These deliberately avoid the library's own numeric
// paths: quadrature is plain composite Simpson written here, truncated CDFs
// are direct piecewise formulas, and special functions come from the standard
// library, so agreement with the implementation is meaningful evidence.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blockprec/rng.hpp"
#include "blockprec/sym_matrix.hpp"

namespace testsupport {

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2 != 0) {
    ++panels;
  }
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) {
    acc += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = cdf(samples[i]);
    d = std::max(d, std::abs(c - (i + 1) / n));
    d = std::max(d, std::abs(c - i / n));
  }
  return d;
}

// Asymptotic Kolmogorov distribution with the Stephens small-sample tweak.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) {
      break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

// Regularized incomplete gamma P(a, x) via series / continued fraction.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) {
    throw std::invalid_argument("gamma_p domain");
  }
  if (x == 0.0) {
    return 0.0;
  }
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) {
        break;
      }
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x)
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) {
      d = 1e-300;
    }
    c = b + an / c;
    if (std::abs(c) < 1e-300) {
      c = 1e-300;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) {
      break;
    }
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

inline double chi2_pvalue(double stat, int df) {
  return 1.0 - gamma_p(0.5 * df, 0.5 * stat);
}

// Piecewise-exact CDF of the exponential density on (lo, hi).
inline double trunc_exp_cdf(double rate, double lo, double hi, double x) {
  if (x <= lo) {
    return 0.0;
  }
  if (x >= hi) {
    return 1.0;
  }
  const double zlo = std::exp(-rate * lo);
  const double zhi = std::isfinite(hi) ? std::exp(-rate * hi) : 0.0;
  return (zlo - std::exp(-rate * x)) / (zlo - zhi);
}

// Antiderivative of exp(-rate*|t|), then the truncated CDF from it.
inline double laplace_antideriv(double rate, double t) {
  if (t <= 0.0) {
    return std::exp(rate * t) / rate;
  }
  return (2.0 - std::exp(-rate * t)) / rate;
}

inline double trunc_laplace_cdf(double rate, double lo, double hi, double x) {
  if (x <= lo) {
    return 0.0;
  }
  if (x >= hi) {
    return 1.0;
  }
  const double glo = std::isfinite(lo) ? laplace_antideriv(rate, lo) : 0.0;
  const double ghi = std::isfinite(hi) ? laplace_antideriv(rate, hi) : 2.0 / rate;
  return (laplace_antideriv(rate, x) - glo) / (ghi - glo);
}

// Well-conditioned random PD matrix: A A' + ridge I with standard normal A.
inline blockprec::SymMatrix random_pd(int dim, blockprec::RandomStream& rng, double ridge = 0.5) {
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = rng.next_normal();
    }
  }
  Eigen::MatrixXd x = a * a.transpose() / dim + ridge * Eigen::MatrixXd::Identity(dim, dim);
  return blockprec::SymMatrix::from_dense(x, 1e-6);
}

}  // namespace testsupport
