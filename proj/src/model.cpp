#include "blockprec/model.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"
#include "blockprec/special_functions.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.69314718055994530941723212145818;
constexpr double kLogPi = 1.1447298858494001741434273513531;

void check_dims(const SymMatrix& x, const Partition& p) {
  if (x.dim() != p.dim()) {
    throw InvalidInputError("density: matrix and partition dimensions differ");
  }
}

}  // namespace

double logdens_gl1(const SymMatrix& x, const Partition& p, const PenaltyConfig& c) {
  check_dims(x, p);
  c.validate();
  if (!is_pd(x)) {
    return -kInf;
  }
  const int d = x.dim();
  double out = 0.0;
  for (int i = 0; i < d; ++i) {
    out -= c.lambda_d * std::abs(x(i, i));
    for (int j = i + 1; j < d; ++j) {
      out -= (p.same_group(i, j) ? c.lambda_1 : c.lambda_0) * std::abs(x(i, j));
    }
  }
  return out;
}

double logdens_gl12(const SymMatrix& x, const Partition& p, const PenaltyConfig& c) {
  check_dims(x, p);
  c.validate();
  if (!is_pd(x)) {
    return -kInf;
  }
  const int d = x.dim();
  const int k = p.groups();
  double out = 0.0;
  for (int i = 0; i < d; ++i) {
    out -= c.lambda_d * std::abs(x(i, i));
    for (int j = i + 1; j < d; ++j) {
      if (p.same_group(i, j)) {
        out -= c.lambda_1 * std::abs(x(i, j));
      }
    }
  }
  // between-block l2 norms over the representative (unordered) entries
  Eigen::MatrixXd block_sq = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (!p.same_group(i, j)) {
        const double v = x(i, j);
        block_sq(p.group(i), p.group(j)) += v * v;
      }
    }
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double norm = std::sqrt(block_sq(a, b) + block_sq(b, a));
      out -= c.lambda_0 * static_cast<double>(p.cross_pairs(a, b)) * norm;
    }
  }
  return out;
}

double logdens(PriorKind kind, const SymMatrix& x, const Partition& p, const PenaltyConfig& c) {
  return kind == PriorKind::gl1 ? logdens_gl1(x, p, c) : logdens_gl12(x, p, c);
}

double log_bound_gl1(const Partition& p, const PenaltyConfig& c) {
  c.validate();
  const long long within = p.within_pairs();
  const long long total = static_cast<long long>(p.dim()) * (p.dim() - 1) / 2;
  const long long cross = total - within;
  return -p.dim() * std::log(c.lambda_d) + within * (kLog2 - std::log(c.lambda_1)) +
         cross * (kLog2 - std::log(c.lambda_0));
}

double log_bound_gl12_block_term(long long c_kl, double lambda_0) {
  const double cd = static_cast<double>(c_kl);
  return 0.5 * (cd - 1.0) * kLogPi + log_gamma(0.5 * (cd + 1.0)) + cd * kLog2 -
         cd * std::log(lambda_0 * cd);
}

double log_bound_gl12(const Partition& p, const PenaltyConfig& c) {
  c.validate();
  double out = -p.dim() * std::log(c.lambda_d) + p.within_pairs() * (kLog2 - std::log(c.lambda_1));
  const int k = p.groups();
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      out += log_bound_gl12_block_term(p.cross_pairs(a, b), c.lambda_0);
    }
  }
  return out;
}

double log_bound(PriorKind kind, const Partition& p, const PenaltyConfig& c) {
  return kind == PriorKind::gl1 ? log_bound_gl1(p, c) : log_bound_gl12(p, c);
}

double exact_logz_2d(const PenaltyConfig& c, bool same_group) {
  c.validate();
  const double l1 = c.lambda_1;
  const double l0 = c.lambda_0;
  if (std::abs(c.lambda_d - l1) > 1e-12 * std::max(1.0, l1)) {
    throw UnsupportedConfigError("exact_logz_2d: closed form requires lambda_d == lambda_1");
  }
  if (same_group) {
    // (8 pi sqrt(3) - 18) / (27 lambda_1^3)
    const double numer = 8.0 * M_PI * std::sqrt(3.0) - 18.0;
    return std::log(numer / 27.0) - 3.0 * std::log(l1);
  }
  if (std::abs(l0 - 2.0 * l1) <= 1e-9 * std::max(l0, 2.0 * l1)) {
    throw SingularityError("exact_logz_2d: removable singularity at lambda_0 == 2*lambda_1");
  }
  const double x = l1 * l1 - 0.25 * l0 * l0;
  double z;
  if (x > 0.0) {
    const double sq = std::sqrt(x);
    z = -l0 / (2.0 * x * l1 * l1) + std::atan(2.0 * sq / l0) / (x * sq);
  } else {
    // lambda_0 > 2*lambda_1: both square roots go imaginary; with
    // arctan(i y) = i artanh(y) the expression stays real
    const double m = -x;
    const double sq = std::sqrt(m);
    z = l0 / (2.0 * m * l1 * l1) - std::atanh(2.0 * sq / l0) / (m * sq);
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw SingularityError("exact_logz_2d: closed form evaluated to a non-positive value");
  }
  return std::log(z);
}

WishartSample sample_wishart_identity(int dim, int dof, RandomStream& rng) {
  if (dim < 1 || dof < dim) {
    throw InvalidInputError("sample_wishart_identity: need dof >= dim >= 1");
  }
  // Bartlett factor: lower triangular, chi-squared diagonal (integer dof, so
  // a sum of squared normals is exact), standard normals below.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  double logdet = 0.0;
  for (int i = 0; i < dim; ++i) {
    double chi2 = 0.0;
    for (int r = 0; r < dof - i; ++r) {
      const double z = rng.next_normal();
      chi2 += z * z;
    }
    a(i, i) = std::sqrt(chi2);
    logdet += std::log(chi2);
    for (int j = 0; j < i; ++j) {
      a(i, j) = rng.next_normal();
    }
  }
  WishartSample out;
  out.x = SymMatrix::from_dense(a * a.transpose(), 1e-6);
  out.logdet = logdet;
  return out;
}

double wishart_identity_logpdf(int dim, int dof, double logdet_x, double trace_x) {
  return 0.5 * (dof - dim - 1) * logdet_x - 0.5 * trace_x - 0.5 * dof * dim * kLog2 -
         log_multigamma(0.5 * dof, dim);
}

namespace {

double is_log_weight(const Partition& p, const PenaltyConfig& c, PriorKind kind,
                     std::uint64_t seed, long long index) noexcept {
  // noexcept: runs inside an OpenMP region; a degenerate sample becomes a
  // zero weight instead of an escaping exception
  try {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(index));
    const int d = p.dim();
    const WishartSample w = sample_wishart_identity(d, d, rng);
    const double target = logdens(kind, w.x, p, c);
    const double proposal = wishart_identity_logpdf(d, d, w.logdet, w.x.dense().trace());
    return target - proposal;
  } catch (...) {
    return -kInf;
  }
}

LogZEstimate reduce_log_weights(const std::vector<double>& logw) {
  double maxw = -kInf;
  for (double v : logw) {
    if (std::isfinite(v) && v > maxw) {
      maxw = v;
    }
  }
  if (!std::isfinite(maxw)) {
    throw EstimationFailedError("estimate_logz_is: all importance weights are zero or non-finite");
  }
  const long long n = static_cast<long long>(logw.size());
  double sum = 0.0;
  double sumsq = 0.0;
  for (double v : logw) {
    const double a = std::isfinite(v) ? std::exp(v - maxw) : 0.0;
    sum += a;
    sumsq += a * a;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
  LogZEstimate out;
  out.logz = maxw + std::log(mean);
  // delta method: se(log Zhat) ~= sd(w) / (sqrt(n) * mean(w))
  out.std_err = std::sqrt(var / n) / mean;
  out.n_samples = n;
  return out;
}

}  // namespace

LogZEstimate estimate_logz_is(const Partition& p, const PenaltyConfig& c, PriorKind kind,
                              long long n_samples, std::uint64_t seed) {
  if (n_samples < 1000) {
    throw InvalidInputError("estimate_logz_is: need at least 1000 samples");
  }
  c.validate();
  std::vector<double> logw(static_cast<std::size_t>(n_samples));
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < n_samples; ++s) {
    logw[static_cast<std::size_t>(s)] = is_log_weight(p, c, kind, seed, s);
  }
  return reduce_log_weights(logw);
}

LogZEstimate estimate_logz_is_serial(const Partition& p, const PenaltyConfig& c, PriorKind kind,
                                     long long n_samples, std::uint64_t seed) {
  if (n_samples < 1000) {
    throw InvalidInputError("estimate_logz_is: need at least 1000 samples");
  }
  c.validate();
  std::vector<double> logw(static_cast<std::size_t>(n_samples));
  for (long long s = 0; s < n_samples; ++s) {
    logw[static_cast<std::size_t>(s)] = is_log_weight(p, c, kind, seed, s);
  }
  return reduce_log_weights(logw);
}

}  // namespace blockprec
