#pragma once

#include <cstdint>
#include <vector>

#include "blockprec/model.hpp"
#include "blockprec/partition.hpp"
#include "blockprec/penalties.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

struct ChainConfig {
  int n_sweeps = 1200;  // total sweeps including burn-in
  int burn_in = 200;
  std::uint64_t seed = 0;
  int thin = 1;  // record every thin-th post-burn-in sweep
  bool randomized_order = false;  // shuffle the entry order each sweep (mixing diagnostics)
  bool keep_samples = false;      // retain the recorded states (upper triangles)
};

struct ChainSummary {
  SymMatrix mean_abs;          // E[|X_ij|] over kept samples
  Eigen::VectorXd mean_diag;   // E[X_ii]
  SymMatrix ess;               // effective sample count per entry
  int kept = 0;
  long long boundary_nudges = 0;       // draws pushed off an interval endpoint
  long long quadrature_fallbacks = 0;  // hyperbolic draws served by rejection
  std::uint64_t seed = 0;
  // row-major upper triangles of the kept states, when keep_samples was set
  std::vector<std::vector<double>> samples;
};

// Single-site Gibbs sweep over all D(D+1)/2 unique entries: each entry is
// redrawn from its exact truncated conditional on the PD interval from
// pd_interval. Diagonals are truncated exponentials, within-group (and all
// gl1) off-diagonals truncated Laplace, gl12 between-group entries truncated
// hyperbolic with rate C_kl * lambda_0. Every stored state is PD.
ChainSummary gibbs_chain(PriorKind kind, const Partition& p, const PenaltyConfig& c,
                         const ChainConfig& cfg);

// Independent chains with derived seeds; the OpenMP version and the serial
// reference return bitwise-identical summaries.
std::vector<ChainSummary> run_chains(PriorKind kind, const Partition& p, const PenaltyConfig& c,
                                     const ChainConfig& base, int n_chains);
std::vector<ChainSummary> run_chains_serial(PriorKind kind, const Partition& p,
                                            const PenaltyConfig& c, const ChainConfig& base,
                                            int n_chains);

// Kept-sample-weighted average of per-chain statistics.
ChainSummary pool_summaries(const std::vector<ChainSummary>& chains);

}  // namespace blockprec
