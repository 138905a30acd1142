#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockprec/dataset.hpp"
#include "blockprec/search.hpp"

namespace blockprec {

enum class Method {
  tikhonov,
  il1,
  gl12_known,
  gl1_greedy,
  gl1_exhaustive,
  gl12_greedy,
  gl12_exhaustive,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct GridOptions {
  int points = 10;
  double top = 1e4;
  double bottom = 1.0;
};

// Descending log-spaced grid values, endpoints inclusive.
std::vector<double> penalty_grid_values(const GridOptions& grid);

// All (lambda_d, lambda_1, lambda_0) triples from the grid satisfying
// lambda_0 > lambda_1 > 0.5 * lambda_d.
std::vector<PenaltyConfig> constrained_triples(const GridOptions& grid, double alpha_0);

struct CvOptions {
  int outer_folds = 5;
  GridOptions grid;
  double alpha_0 = 1.0;
  std::uint64_t seed = 0;
  SolverOptions solver;
  SearchOptions search;  // kind is set per method
  std::optional<Partition> known_groups;  // required by gl12_known
  // Penalties are prior-scale rates under the N/2 likelihood by default;
  // absorb_penalties uses grid values directly as the objective's rates.
  bool absorb_penalties = false;
  bool parallel_grid = true;
};

struct FoldResult {
  int fold = 0;
  double test_loglik = 0.0;
  PenaltyConfig selected;
  double validation_loglik = 0.0;
  double wall_seconds = 0.0;
};

struct MethodReport {
  Method method = Method::tikhonov;
  std::vector<FoldResult> folds;
  double median_test_loglik = 0.0;
  double wall_seconds = 0.0;
  int failed_candidates = 0;  // grid points that errored (scored as -inf)
};

struct CvReport {
  std::vector<MethodReport> methods;
  std::vector<std::vector<int>> fold_test_indices;
  int candidate_triples = 0;  // grid size after the constraint
  std::uint64_t seed = 0;
};

double median(std::vector<double> values);

// The five-fold protocol: within each outer fold, one fifth of the training
// rows select the penalties by validation log likelihood, the winner is refit
// on the full training portion, and the test log likelihood is recorded.
CvReport cross_validate(const Dataset& d, const std::vector<Method>& methods,
                        const CvOptions& opts);

}  // namespace blockprec
