#pragma once

#include <string>
#include <vector>

#include "blockprec/solver.hpp"
#include "blockprec/variational.hpp"

namespace blockprec {

struct SplitProposal {
  std::vector<int> part_a;  // variable indices, disjoint, both nonempty
  std::vector<int> part_b;
  double cut_weight = 0.0;  // normalized-cut value of the chosen bipartition
};

// Normalized cut of the similarity graph W = |Omega(U,U)| +
// 0.5 |Omega(U,Ubar)| |Omega(U,Ubar)|', restricted to group `group` of p:
// Fiedler vector of the normalized Laplacian, swept over sorted entries.
// Zero-degree vertices are parked on the smaller side, in index order.
SplitProposal propose_split(const Partition& p, int group, const SymMatrix& omega);

struct SearchOptions {
  PriorKind kind = PriorKind::gl1;
  SolverOptions solver;
  DirichletPrior prior = DirichletPrior::alpha0_over_k;
  double cycle_tol = 1e-6;  // relative bound change ending the update cycles
  int max_cycles = 100;
  int max_splits = 64;
  bool parallel_scoring = true;  // exhaustive mode: score group splits concurrently
};

struct SearchStep {
  int step = 0;
  int group = -1;  // split group id (in the pre-split partition); -1 for the initial state
  std::vector<int> part_a;
  std::vector<int> part_b;
  double bound = 0.0;
};

struct SearchReport {
  std::vector<SearchStep> trajectory;  // initial state plus accepted splits
  Partition final_partition;
  SymMatrix final_omega;
  VariationalState final_state;
  double final_bound = 0.0;
  std::string termination;  // no_improving_split | solver_failure | max_splits
  int rounds = 0;
};

// Start from one group; propose spectral splits, cheapest normalized cut per
// variable first; accept the first split whose full refit raises the bound.
SearchReport greedy_search(const SampleStats& stats, const PenaltyConfig& c,
                           const SearchOptions& opts);

// Score every group's split with a partial refit restricted to the splitting
// group's rows, fully refit the winner, accept if the bound rises.
SearchReport exhaustive_search(const SampleStats& stats, const PenaltyConfig& c,
                               const SearchOptions& opts);

}  // namespace blockprec
