#pragma once

#include <cstdint>

#include "blockprec/partition.hpp"
#include "blockprec/penalties.hpp"
#include "blockprec/rng.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

enum class PriorKind { gl1, gl12 };

// Unnormalized log density of the group l1 PD-matrix distribution:
// -sum_i lambda_d |X_ii| - sum_{i<j} (lambda_1 or lambda_0) |X_ij|, counting
// each off-diagonal entry once; -inf outside the PD cone.
double logdens_gl1(const SymMatrix& x, const Partition& p, const PenaltyConfig& c);

// Group l1,2 variant: within-group entries as above, each between-group block
// penalized by C_kl * lambda_0 times the l2 norm of its entries.
double logdens_gl12(const SymMatrix& x, const Partition& p, const PenaltyConfig& c);

double logdens(PriorKind kind, const SymMatrix& x, const Partition& p, const PenaltyConfig& c);

// log of the normalizer upper bound obtained by integrating over symmetric
// matrices with positive diagonal instead of the PD cone.
double log_bound_gl1(const Partition& p, const PenaltyConfig& c);
double log_bound_gl12(const Partition& p, const PenaltyConfig& c);
double log_bound(PriorKind kind, const Partition& p, const PenaltyConfig& c);

// log of the single between-block factor of the gl12 bound: the normalizer of
// the C-dimensional multivariate Laplace with rate lambda_0 * C.
double log_bound_gl12_block_term(long long c_kl, double lambda_0);

// Exact D=2 normalizer of the (shared) gl1/gl12 distribution. Requires
// lambda_d == lambda_1. The different-group case is continued analytically
// across lambda_0 = 2*lambda_1 via artanh, but the line itself is a removable
// singularity of the closed form and is rejected.
double exact_logz_2d(const PenaltyConfig& c, bool same_group);

// Wishart(identity scale, dof) draw via the Bartlett decomposition, with the
// log determinant carried along since the factor is available for free.
struct WishartSample {
  SymMatrix x;
  double logdet = 0.0;
};
WishartSample sample_wishart_identity(int dim, int dof, RandomStream& rng);

// log density of Wishart(identity scale, dof) on the D(D+1)/2 distinct
// entries, for a PD x with known log determinant.
double wishart_identity_logpdf(int dim, int dof, double logdet_x, double trace_x);

struct LogZEstimate {
  double logz = 0.0;
  double std_err = 0.0;
  long long n_samples = 0;
};

// Importance-sampling estimate of the log normalizer with a
// Wishart(identity, dof = D) proposal. Deterministic for a fixed seed:
// sample s uses RandomStream::substream(seed, s), so the OpenMP version and
// the serial reference produce bitwise-identical results.
LogZEstimate estimate_logz_is(const Partition& p, const PenaltyConfig& c, PriorKind kind,
                              long long n_samples, std::uint64_t seed);
LogZEstimate estimate_logz_is_serial(const Partition& p, const PenaltyConfig& c, PriorKind kind,
                                     long long n_samples, std::uint64_t seed);

}  // namespace blockprec
