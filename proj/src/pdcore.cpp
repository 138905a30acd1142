#include "blockprec/pdcore.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "blockprec/errors.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double raw_det(Eigen::MatrixXd m) { return Eigen::PartialPivLU<Eigen::MatrixXd>(std::move(m)).determinant(); }

double det_with_entry(const SymMatrix& x, int i, int j, double t) {
  Eigen::MatrixXd m = x.dense();
  m(i, j) = t;
  m(j, i) = t;
  return raw_det(std::move(m));
}

void check_entry_indices(const SymMatrix& x, int i, int j) {
  if (i < 0 || j < 0 || i >= x.dim() || j >= x.dim()) {
    throw InvalidInputError("entry index out of range");
  }
  if (!x.all_finite()) {
    throw InvalidInputError("matrix has non-finite entries");
  }
}

}  // namespace

LogDetResult cholesky_logdet(const SymMatrix& x) {
  if (!x.all_finite()) {
    throw InvalidInputError("cholesky_logdet: non-finite entries");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(x.dense());
  if (llt.info() != Eigen::Success) {
    return {0.0, false};
  }
  const auto& L = llt.matrixLLT();
  double logdet = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double pivot = L(i, i);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      return {0.0, false};
    }
    logdet += std::log(pivot);
  }
  return {2.0 * logdet, true};
}

bool is_pd(const SymMatrix& x) { return cholesky_logdet(x).success; }

DetPoly det_poly(const SymMatrix& x, int i, int j) {
  check_entry_indices(x, i, j);
  DetPoly poly;
  poly.center = x(i, j);
  const double h = 1.0 + std::abs(poly.center);
  if (i == j) {
    const double f0 = det_with_entry(x, i, j, poly.center);
    const double f1 = det_with_entry(x, i, j, poly.center + h);
    poly.a = 0.0;
    poly.b = (f1 - f0) / h;
    poly.c = f0;
  } else {
    const double fm = det_with_entry(x, i, j, poly.center - h);
    const double f0 = det_with_entry(x, i, j, poly.center);
    const double fp = det_with_entry(x, i, j, poly.center + h);
    poly.a = (fp - 2.0 * f0 + fm) / (2.0 * h * h);
    poly.b = (fp - fm) / (2.0 * h);
    poly.c = f0;
  }
  return poly;
}

namespace {

// One Newton step on the true determinant tightens the interpolated root to
// near machine precision.
double polish_root(const SymMatrix& x, int i, int j, const DetPoly& poly, double root) {
  for (int pass = 0; pass < 2; ++pass) {
    const double s = root - poly.center;
    const double deriv = 2.0 * poly.a * s + poly.b;
    if (!std::isfinite(deriv) || std::abs(deriv) < 1e-300) {
      break;
    }
    const double f = det_with_entry(x, i, j, root);
    const double step = f / deriv;
    if (!std::isfinite(step)) {
      break;
    }
    root -= step;
  }
  return root;
}

bool pd_with_entry(const SymMatrix& x, int i, int j, double t) {
  SymMatrix y = x;
  y.set(i, j, t);
  return is_pd(y);
}

}  // namespace

PdInterval pd_interval(const SymMatrix& x, int i, int j) {
  const DetPoly poly = det_poly(x, i, j);

  if (i == j) {
    if (!(poly.b > 0.0)) {
      throw NoIntervalError("pd_interval: determinant not increasing in the diagonal entry");
    }
    double lo = polish_root(x, i, j, poly, poly.center - poly.c / poly.b);
    const double probe = lo + 1.0 + std::abs(lo);
    if (!pd_with_entry(x, i, j, probe)) {
      throw NoIntervalError("pd_interval: no PD completion for this diagonal entry");
    }
    return {lo, kInf};
  }

  // det is a downward parabola in the off-diagonal entry whenever a PD
  // completion exists; the PD set is exactly the open interval between roots.
  const double scale = std::max({std::abs(poly.a), std::abs(poly.b), std::abs(poly.c), 1e-300});
  const double a = poly.a / scale;
  const double b = poly.b / scale;
  const double c = poly.c / scale;
  const double disc = b * b - 4.0 * a * c;
  if (!(a < 0.0) || !(disc > 0.0)) {
    throw NoIntervalError("pd_interval: no PD completion for this off-diagonal entry");
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = (std::abs(q) > 1e-300) ? c / q : -b / a - r1;
  if (r1 > r2) {
    std::swap(r1, r2);
  }
  double lo = polish_root(x, i, j, poly, poly.center + r1);
  double hi = polish_root(x, i, j, poly, poly.center + r2);
  if (!(lo < hi)) {
    throw NoIntervalError("pd_interval: degenerate interval");
  }
  if (!pd_with_entry(x, i, j, 0.5 * (lo + hi))) {
    throw NoIntervalError("pd_interval: interval midpoint is not PD");
  }
  return {lo, hi};
}

double gaussian_loglik(const SampleStats& stats, const SymMatrix& omega) {
  if (stats.dim != omega.dim() || stats.scatter.dim() != omega.dim()) {
    throw InvalidInputError("gaussian_loglik: dimension mismatch");
  }
  const LogDetResult ld = cholesky_logdet(omega);
  if (!ld.success) {
    throw DomainError("gaussian_loglik: omega is not positive-definite");
  }
  constexpr double log_2pi = 1.8378770664093454835606594728112;
  const double trace = omega.dense().cwiseProduct(stats.scatter.dense()).sum();
  return 0.5 * stats.n * (ld.logdet - trace - stats.dim * log_2pi);
}

}  // namespace blockprec
