#include "blockprec/variational.hpp"

#include <cmath>
#include <limits>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"
#include "blockprec/special_functions.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.69314718055994530941723212145818;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double dirichlet_prior_term(const PenaltyConfig& c, int k, DirichletPrior prior) {
  return prior == DirichletPrior::alpha0_over_k ? c.alpha_0 / k : c.alpha_0;
}

int VariationalState::dim() const {
  return kind == PriorKind::gl1 ? static_cast<int>(phi.rows()) : static_cast<int>(z.size());
}

void VariationalState::validate() const {
  if (alpha.size() < 1 || !(alpha.minCoeff() > 0.0)) {
    throw InvalidInputError("VariationalState: alpha must be positive");
  }
  if (kind == PriorKind::gl1) {
    if (phi.rows() < 1 || phi.cols() != alpha.size()) {
      throw InvalidInputError("VariationalState: phi shape mismatch");
    }
    for (int i = 0; i < phi.rows(); ++i) {
      if (std::abs(phi.row(i).sum() - 1.0) > 1e-12 || phi.row(i).minCoeff() < 0.0) {
        throw InvalidInputError("VariationalState: phi rows must lie on the simplex");
      }
    }
  } else {
    if (z.empty()) {
      throw InvalidInputError("VariationalState: empty hard assignment");
    }
    for (int g : z) {
      if (g < 0 || g >= alpha.size()) {
        throw InvalidInputError("VariationalState: hard label out of range");
      }
    }
  }
}

Partition VariationalState::hard_partition() const {
  if (kind == PriorKind::gl12) {
    return Partition(z);
  }
  std::vector<int> labels(phi.rows());
  for (int i = 0; i < phi.rows(); ++i) {
    int best = 0;
    for (int k = 1; k < phi.cols(); ++k) {
      if (phi(i, k) > phi(i, best)) {
        best = k;
      }
    }
    labels[i] = best;
  }
  return Partition(labels);
}

VariationalState VariationalState::single_group(PriorKind kind, int dim, const PenaltyConfig& c,
                                                DirichletPrior prior) {
  VariationalState s;
  s.kind = kind;
  s.alpha = Eigen::VectorXd::Constant(1, dirichlet_prior_term(c, 1, prior) + dim);
  if (kind == PriorKind::gl1) {
    s.phi = Eigen::MatrixXd::Ones(dim, 1);
  } else {
    s.z.assign(dim, 0);
  }
  return s;
}

Eigen::VectorXd expected_log_theta(const Eigen::VectorXd& alpha) {
  const double psi_total = digamma(alpha.sum());
  Eigen::VectorXd out(alpha.size());
  for (int k = 0; k < alpha.size(); ++k) {
    out(k) = digamma(alpha(k)) - psi_total;
  }
  return out;
}

SymMatrix expected_entry_penalties(const Eigen::MatrixXd& phi, const PenaltyConfig& c) {
  c.validate();
  const int d = static_cast<int>(phi.rows());
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    out.set(i, i, c.lambda_d);
    for (int j = i + 1; j < d; ++j) {
      const double m = phi.row(i).dot(phi.row(j));
      out.set(i, j, m * c.lambda_1 + (1.0 - m) * c.lambda_0);
    }
  }
  return out;
}

namespace {

// Dirichlet bookkeeping shared by both paths.
double dirichlet_terms(const Eigen::VectorXd& alpha, const Eigen::VectorXd& elog_theta,
                       const PenaltyConfig& c, DirichletPrior prior) {
  const int k = static_cast<int>(alpha.size());
  const double a0 = dirichlet_prior_term(c, k, prior);
  double out = log_gamma(k * a0) - k * log_gamma(a0);
  for (int g = 0; g < k; ++g) {
    out += (a0 - 1.0) * elog_theta(g);
  }
  // -E_q[log q(theta)]
  out -= log_gamma(alpha.sum());
  for (int g = 0; g < k; ++g) {
    out += log_gamma(alpha(g)) - (alpha(g) - 1.0) * elog_theta(g);
  }
  return out;
}

}  // namespace

ElboTerms elbo_gl1_terms(const SymMatrix& omega, const VariationalState& state,
                         const SampleStats& stats, const PenaltyConfig& c, DirichletPrior prior) {
  state.validate();
  c.validate();
  if (state.kind != PriorKind::gl1) {
    throw InvalidInputError("elbo_gl1: state is not a gl1-path state");
  }
  const int d = state.dim();
  if (omega.dim() != d || stats.dim != d) {
    throw InvalidInputError("elbo_gl1: dimension mismatch");
  }

  ElboTerms t;
  if (!is_pd(omega)) {
    t.loglik = -kInf;
    return t;
  }
  t.loglik = gaussian_loglik(stats, omega);

  const double log_l1 = std::log(c.lambda_1);
  const double log_l0 = std::log(c.lambda_0);
  double prior_unnorm = 0.0;
  double neg_log_zhat = d * std::log(c.lambda_d);
  for (int i = 0; i < d; ++i) {
    prior_unnorm -= c.lambda_d * std::abs(omega(i, i));
    for (int j = i + 1; j < d; ++j) {
      const double m = state.phi.row(i).dot(state.phi.row(j));
      const double a = std::abs(omega(i, j));
      prior_unnorm -= (m * c.lambda_1 + (1.0 - m) * c.lambda_0) * a;
      neg_log_zhat += m * log_l1 + (1.0 - m) * log_l0 - kLog2;
    }
  }
  t.prior_unnorm = prior_unnorm;
  t.neg_log_zhat = neg_log_zhat;

  const Eigen::VectorXd elog = expected_log_theta(state.alpha);
  t.assign = 0.0;
  t.entropy_z = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < state.groups(); ++k) {
      t.assign += state.phi(i, k) * elog(k);
      t.entropy_z -= xlogx(state.phi(i, k));
    }
  }

  const int k = state.groups();
  const double a0 = dirichlet_prior_term(c, k, prior);
  t.dir_prior = log_gamma(k * a0) - k * log_gamma(a0) + (a0 - 1.0) * elog.sum();
  t.neg_q_theta = -log_gamma(state.alpha.sum());
  for (int g = 0; g < k; ++g) {
    t.neg_q_theta += log_gamma(state.alpha(g)) - (state.alpha(g) - 1.0) * elog(g);
  }
  return t;
}

double elbo_gl1(const SymMatrix& omega, const VariationalState& state, const SampleStats& stats,
                const PenaltyConfig& c, DirichletPrior prior) {
  const ElboTerms t = elbo_gl1_terms(omega, state, stats, c, prior);
  if (!std::isfinite(t.loglik)) {
    return -kInf;
  }
  return t.total();
}

namespace {

// gl12 pieces that tolerate empty groups (needed mid-pass by the local
// z update, where K and alpha stay fixed while groups drain)
double logdens_gl12_raw(const SymMatrix& x, const std::vector<int>& labels, int k,
                        const PenaltyConfig& c) {
  const int d = x.dim();
  double out = 0.0;
  Eigen::MatrixXd block_sq = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < d; ++i) {
    out -= c.lambda_d * std::abs(x(i, i));
    for (int j = i + 1; j < d; ++j) {
      if (labels[i] == labels[j]) {
        out -= c.lambda_1 * std::abs(x(i, j));
      } else {
        const double v = x(i, j);
        block_sq(labels[i], labels[j]) += v * v;
      }
    }
  }
  std::vector<long long> sizes(k, 0);
  for (int g : labels) {
    ++sizes[g];
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const long long c_kl = sizes[a] * sizes[b];
      if (c_kl > 0) {
        out -= c.lambda_0 * static_cast<double>(c_kl) *
               std::sqrt(block_sq(a, b) + block_sq(b, a));
      }
    }
  }
  return out;
}

double log_bound_gl12_raw(const std::vector<int>& labels, int k, const PenaltyConfig& c) {
  std::vector<long long> sizes(k, 0);
  for (int g : labels) {
    ++sizes[g];
  }
  long long within = 0;
  for (int g = 0; g < k; ++g) {
    within += sizes[g] * (sizes[g] - 1) / 2;
  }
  double out = -static_cast<double>(labels.size()) * std::log(c.lambda_d) +
               within * (kLog2 - std::log(c.lambda_1));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const long long c_kl = sizes[a] * sizes[b];
      if (c_kl > 0) {
        out += log_bound_gl12_block_term(c_kl, c.lambda_0);
      }
    }
  }
  return out;
}

double objective_gl12_raw(const SymMatrix& omega, const std::vector<int>& labels, int k,
                          const Eigen::VectorXd& alpha, const SampleStats& stats,
                          const PenaltyConfig& c, DirichletPrior prior, bool omega_checked) {
  if (!omega_checked && !is_pd(omega)) {
    return -kInf;
  }
  const Eigen::VectorXd elog = expected_log_theta(alpha);
  double out = gaussian_loglik(stats, omega);
  out += logdens_gl12_raw(omega, labels, k, c);
  out -= log_bound_gl12_raw(labels, k, c);
  for (int g : labels) {
    out += elog(g);
  }
  out += dirichlet_terms(alpha, elog, c, prior);
  return out;
}

}  // namespace

double objective_gl12(const SymMatrix& omega, const Partition& z, const Eigen::VectorXd& alpha,
                      const SampleStats& stats, const PenaltyConfig& c, DirichletPrior prior) {
  c.validate();
  if (z.dim() != omega.dim() || stats.dim != omega.dim()) {
    throw InvalidInputError("objective_gl12: dimension mismatch");
  }
  if (alpha.size() != z.groups()) {
    throw InvalidInputError("objective_gl12: alpha length must equal the group count");
  }
  if (!is_pd(omega)) {
    return -kInf;
  }
  return objective_gl12_raw(omega, z.labels(), z.groups(), alpha, stats, c, prior, true);
}

Eigen::VectorXd update_alpha(const VariationalState& state, const PenaltyConfig& c,
                             DirichletPrior prior) {
  state.validate();
  const int k = state.groups();
  const double a0 = dirichlet_prior_term(c, k, prior);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(k, a0);
  if (state.kind == PriorKind::gl1) {
    for (int g = 0; g < k; ++g) {
      alpha(g) += state.phi.col(g).sum();
    }
  } else {
    for (int g : state.z) {
      alpha(g) += 1.0;
    }
  }
  return alpha;
}

Eigen::MatrixXd update_phi(const VariationalState& state, const SymMatrix& omega,
                           const PenaltyConfig& c) {
  state.validate();
  c.validate();
  if (state.kind != PriorKind::gl1) {
    throw InvalidInputError("update_phi: state is not a gl1-path state");
  }
  const int d = state.dim();
  if (omega.dim() != d) {
    throw InvalidInputError("update_phi: dimension mismatch");
  }
  const int k = state.groups();
  const Eigen::VectorXd elog = expected_log_theta(state.alpha);
  const double log_l1 = std::log(c.lambda_1);
  const double log_l0 = std::log(c.lambda_0);

  Eigen::MatrixXd phi = state.phi;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd g = elog;
    for (int j = 0; j < d; ++j) {
      if (j == i) {
        continue;
      }
      const double a = std::abs(omega(i, j));
      // per-group gain of sharing a group with j versus not
      const double delta = (log_l1 - c.lambda_1 * a) - (log_l0 - c.lambda_0 * a);
      for (int t = 0; t < k; ++t) {
        g(t) += phi(j, t) * delta;
      }
    }
    const double gmax = g.maxCoeff();
    Eigen::VectorXd w = (g.array() - gmax).exp();
    phi.row(i) = (w / w.sum()).transpose();
  }
  return phi;
}

Partition update_z_local(const Partition& z, const SymMatrix& omega, const Eigen::VectorXd& alpha,
                         const SampleStats& stats, const PenaltyConfig& c, DirichletPrior prior) {
  c.validate();
  const int d = z.dim();
  if (omega.dim() != d || stats.dim != d) {
    throw InvalidInputError("update_z_local: dimension mismatch");
  }
  const int k = z.groups();
  if (alpha.size() != k) {
    throw InvalidInputError("update_z_local: alpha length must equal the group count");
  }
  if (!is_pd(omega)) {
    throw DomainError("update_z_local: omega is not positive-definite");
  }

  // alpha and the likelihood are fixed during the pass, so only the
  // label-dependent terms matter for the argmax
  const Eigen::VectorXd elog = expected_log_theta(alpha);
  auto score = [&](const std::vector<int>& labels) {
    double out = logdens_gl12_raw(omega, labels, k, c) - log_bound_gl12_raw(labels, k, c);
    for (int g : labels) {
      out += elog(g);
    }
    return out;
  };

  std::vector<int> labels = z.labels();
  for (int i = 0; i < d; ++i) {
    const int orig = labels[i];
    int best = orig;
    double best_val = score(labels);
    for (int cand = 0; cand < k; ++cand) {
      if (cand == orig) {
        continue;
      }
      labels[i] = cand;
      const double val = score(labels);
      // strict improvement required to move, so an optimal z is a fixed point
      if (val > best_val) {
        best_val = val;
        best = cand;
      }
    }
    labels[i] = best;
  }
  return Partition(labels);  // canonicalization drops groups that drained
}

}  // namespace blockprec
