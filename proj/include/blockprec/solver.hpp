#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "blockprec/model.hpp"
#include "blockprec/partition.hpp"
#include "blockprec/penalties.hpp"
#include "blockprec/sym_matrix.hpp"

namespace blockprec {

// The solver works on the dual: maximize log det(W) subject to per-entry box
// constraints |W_ij - S_ij| <= r_ij and, in the group case, per-block ball
// constraints ||W_block - S_block||_2 <= radius over the representative
// (unordered) between-group entries. The primal estimate is Omega = W^{-1}.
//
// Radii are exactly the penalty rates of the penalized-likelihood objective
// log det(Omega) - trace(Omega S) - sum_ij rate_ij |Omega_ij| (double sum,
// so each off-diagonal entry is counted in both triangles, the diagonal
// once). Prior-scale rates (which count each entry once and sit under an N/2
// likelihood factor) convert via the n argument of the factories below:
// diagonal 2*rate/n, off-diagonal rate/n. That conversion is the single
// N-scaling point of the codebase.

struct SolverOptions {
  double tol = 1e-6;       // duality-gap stopping threshold
  int max_iter = 5000;
  double armijo = 1e-4;    // sufficient-increase fraction for backtracking
  double step_min = 1e-14;
  double step_max = 1e14;
  bool track_objective = false;  // record dual objective per iteration
};

struct BlockBall {
  int k = 0;
  int l = 0;
  std::vector<std::pair<int, int>> entries;  // representative (i, j), i < j
  double radius = 0.0;
};

struct DualRadii {
  Eigen::MatrixXd box;             // per-entry radius; ignored for ball entries
  std::vector<BlockBall> balls;    // between-group blocks (group case only)
  Eigen::MatrixXi ball_id;         // -1 = box entry, else index into balls
  int dim() const { return static_cast<int>(box.rows()); }
};

// n == 0: rates are used as radii verbatim. n > 0: prior-scale conversion.
DualRadii l1_radii(const SymMatrix& penalties, int n = 0);
DualRadii gl1_radii(const Partition& p, const PenaltyConfig& c, int n = 0);
DualRadii gl12_radii(const Partition& p, const PenaltyConfig& c, int n = 0);
DualRadii radii_for(PriorKind kind, const Partition& p, const PenaltyConfig& c, int n = 0);

struct FitResult {
  SymMatrix omega;   // primal estimate, always PD
  SymMatrix sigma;   // dual variable W (the covariance estimate)
  double gap = 0.0;  // duality gap at exit
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;  // primal penalized objective at omega
  std::vector<double> trace;  // dual objective per iteration when tracked
};

// (S + lam I)^{-1}; the closed-form solution under a diagonal-only penalty.
SymMatrix tikhonov(const SymMatrix& s, double lam);

FitResult fit_penalized(const SymMatrix& s, const DualRadii& radii, const SolverOptions& opts = {});

FitResult fit_l1(const SymMatrix& s, const SymMatrix& penalties, int n = 0,
                 const SolverOptions& opts = {});
FitResult fit_gl12(const SymMatrix& s, const Partition& p, const PenaltyConfig& c, int n = 0,
                   const SolverOptions& opts = {});

// log det(Omega) - trace(Omega S) - R(Omega) with R matching the radii
// semantics above; -inf when omega is not PD.
double primal_objective(const SymMatrix& omega, const SymMatrix& s, const DualRadii& radii);

// Duality gap of a feasible pair (omega = W^{-1}, W): trace(W^{-1} S)
// + R(W^{-1}) - D.
double duality_gap(const SymMatrix& w, const SymMatrix& s, const DualRadii& radii);

// Max stationarity violation of omega: entries (blocks) with magnitude above
// zero_tol * max|omega| must have gradient Omega^{-1} - S aligned with the
// penalty subgradient; zero entries (blocks) must satisfy the bound.
double kkt_residual(const SymMatrix& omega, const SymMatrix& s, const DualRadii& radii,
                    double zero_tol = 1e-6);

// Coordinate-ascent refit over the entries with at least one index in rows
// (plus their diagonal): exact one-dimensional maximization per entry, so the
// objective never decreases and untouched entries stay bit-identical.
SymMatrix partial_refit(const SymMatrix& omega, const SymMatrix& s, const std::vector<int>& rows,
                        const DualRadii& radii, const SolverOptions& opts = {});
SymMatrix partial_refit(const SymMatrix& omega, const SymMatrix& s, const std::vector<int>& rows,
                        const Partition& p, const PenaltyConfig& c, PriorKind kind, int n = 0,
                        const SolverOptions& opts = {});

}  // namespace blockprec
