#pragma once

#include <vector>

#include "blockprec/model.hpp"
#include "blockprec/partition.hpp"
#include "blockprec/penalties.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

// The Dirichlet prior parameter fed to the closed-form alpha update. The
// hierarchical model places a symmetric Dirichlet(alpha_0 / K) on the mixing
// proportions; alpha0_literal instead uses alpha_0 itself as the per-group
// prior count.
enum class DirichletPrior { alpha0_over_k, alpha0_literal };

double dirichlet_prior_term(const PenaltyConfig& c, int k, DirichletPrior prior);

// Variational posterior state. The gl1 path keeps fully factorized soft
// responsibilities phi (D x K, rows on the simplex); the gl12 path works with
// hard labels z because its bound couples the indicators. alpha are the
// Dirichlet parameters of q(theta).
struct VariationalState {
  PriorKind kind = PriorKind::gl1;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd phi;     // gl1 path only
  std::vector<int> z;      // gl12 path only

  int groups() const { return static_cast<int>(alpha.size()); }
  int dim() const;
  void validate() const;

  // MAP assignments (gl1) or the hard labels (gl12), canonicalized
  Partition hard_partition() const;

  static VariationalState single_group(PriorKind kind, int dim, const PenaltyConfig& c,
                                       DirichletPrior prior);
};

// E_q[log theta_k] = digamma(alpha_k) - digamma(sum alpha)
Eigen::VectorXd expected_log_theta(const Eigen::VectorXd& alpha);

// Lambda-bar: expected per-entry rates under soft responsibilities,
// m_ij = phi_i . phi_j.
SymMatrix expected_entry_penalties(const Eigen::MatrixXd& phi, const PenaltyConfig& c);

struct ElboTerms {
  double loglik = 0.0;        // Gaussian term
  double prior_unnorm = 0.0;  // E_q[log p~(Omega | z)]
  double neg_log_zhat = 0.0;  // -E_q[log Zhat_1(z)]
  double assign = 0.0;        // E_q[log p(z | theta)]
  double dir_prior = 0.0;     // E_q[log p(theta | alpha_0)]
  double entropy_z = 0.0;     // -E_q[log q(z)]
  double neg_q_theta = 0.0;   // -E_q[log q(theta)]
  double total() const {
    return loglik + prior_unnorm + neg_log_zhat + assign + dir_prior + entropy_z + neg_q_theta;
  }
};

ElboTerms elbo_gl1_terms(const SymMatrix& omega, const VariationalState& state,
                         const SampleStats& stats, const PenaltyConfig& c,
                         DirichletPrior prior = DirichletPrior::alpha0_over_k);

// Variational lower bound on the log posterior for the gl1 path; -inf when
// omega is outside the PD cone.
double elbo_gl1(const SymMatrix& omega, const VariationalState& state, const SampleStats& stats,
                const PenaltyConfig& c, DirichletPrior prior = DirichletPrior::alpha0_over_k);

// Hard-assignment bound for the gl12 path: likelihood + unnormalized log
// density - log bound + Dirichlet terms (theta integrated variationally).
double objective_gl12(const SymMatrix& omega, const Partition& z, const Eigen::VectorXd& alpha,
                      const SampleStats& stats, const PenaltyConfig& c,
                      DirichletPrior prior = DirichletPrior::alpha0_over_k);

// Closed-form coordinate update of the Dirichlet parameters:
// alpha_k = prior_term + sum_i phi_ik (soft) or + group count (hard).
Eigen::VectorXd update_alpha(const VariationalState& state, const PenaltyConfig& c,
                             DirichletPrior prior = DirichletPrior::alpha0_over_k);

// One full coordinate-ascent pass over the phi rows (sequential, so the
// elbo is non-decreasing); returns the updated matrix.
Eigen::MatrixXd update_phi(const VariationalState& state, const SymMatrix& omega,
                           const PenaltyConfig& c);

// One pass of local reassignment of the hard labels: each z_i moves to the
// group maximizing the gl12 objective with alpha and K held fixed; empty
// groups are dropped at the end of the pass.
Partition update_z_local(const Partition& z, const SymMatrix& omega, const Eigen::VectorXd& alpha,
                         const SampleStats& stats, const PenaltyConfig& c,
                         DirichletPrior prior = DirichletPrior::alpha0_over_k);

}  // namespace blockprec
