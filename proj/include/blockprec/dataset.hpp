#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blockprec/partition.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

struct Dataset {
  Eigen::MatrixXd rows;  // N x D
  std::vector<std::string> names;
  std::string provenance;
  int n() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

// Rectangular numeric CSV. Parse failures carry the 1-based file line.
Dataset ingest_csv(const std::string& path, bool has_header);

// Center and scale to unit variance (1/N normalization, so the scatter of the
// standardized data has an exactly unit diagonal). The returned stats retain
// the transform for application to held-out rows.
std::pair<Dataset, SampleStats> standardize(const Dataset& d);

// (1/N) scatter of rows pushed through the stats' center/scale transform.
SymMatrix scatter_with(const SampleStats& stats, const Eigen::MatrixXd& rows);

// Gaussian log likelihood of held-out rows under omega, using the training
// transform (no leakage: test rows are centered by the training means).
double heldout_loglik(const SampleStats& train, const Eigen::MatrixXd& test_rows,
                      const SymMatrix& omega);

struct SynthSpec {
  std::vector<int> group_sizes;
  int n = 100;
  double within = 0.4;  // within-block off-diagonal of the precision matrix
  double noise = 0.0;   // half-width of uniform between-block perturbations
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset data;
  Partition planted;
  SymMatrix omega_true;
};

// Samples N rows from N(0, Omega^{-1}) with a block-structured precision
// matrix; rejects parameterizations that leave the PD cone.
SynthResult synth_blocks(const SynthSpec& spec);

}  // namespace blockprec
