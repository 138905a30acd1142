#include "blockprec/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SplitProposal propose_split(const Partition& p, int group, const SymMatrix& omega) {
  if (group < 0 || group >= p.groups()) {
    throw InvalidInputError("propose_split: group id out of range");
  }
  if (omega.dim() != p.dim()) {
    throw InvalidInputError("propose_split: dimension mismatch");
  }
  const std::vector<int> u = p.members()[group];
  const int m = static_cast<int>(u.size());
  if (m < 2) {
    throw NotSplittableError("propose_split: group has fewer than two members");
  }
  std::vector<int> ubar;
  for (int i = 0; i < p.dim(); ++i) {
    if (p.group(i) != group) {
      ubar.push_back(i);
    }
  }

  // similarity: in-group coupling plus shared out-of-group neighborhoods
  Eigen::MatrixXd w(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      w(a, b) = std::abs(omega(u[a], u[b]));
    }
  }
  if (!ubar.empty()) {
    Eigen::MatrixXd cross(m, static_cast<int>(ubar.size()));
    for (int a = 0; a < m; ++a) {
      for (std::size_t t = 0; t < ubar.size(); ++t) {
        cross(a, static_cast<int>(t)) = std::abs(omega(u[a], ubar[t]));
      }
    }
    w += 0.5 * cross * cross.transpose();
  }
  w.diagonal().setZero();

  Eigen::VectorXd deg = w.rowwise().sum();
  std::vector<int> active;
  std::vector<int> isolated;
  for (int a = 0; a < m; ++a) {
    (deg(a) > 0.0 ? active : isolated).push_back(a);
  }

  SplitProposal out;
  std::vector<char> in_a(m, 0);

  if (active.size() < 2) {
    // no usable graph: deterministic fallback, first member versus the rest
    in_a[0] = 1;
    out.cut_weight = 0.0;
  } else {
    const int na = static_cast<int>(active.size());
    Eigen::MatrixXd wa(na, na);
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < na; ++b) {
        wa(a, b) = w(active[a], active[b]);
      }
    }
    Eigen::VectorXd dega = wa.rowwise().sum();
    Eigen::VectorXd dinv = dega.array().sqrt().inverse();
    Eigen::MatrixXd lap =
        Eigen::MatrixXd::Identity(na, na) - dinv.asDiagonal() * wa * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (lap + lap.transpose()));
    const Eigen::VectorXd fiedler = eig.eigenvectors().col(1);

    std::vector<int> order(na);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (fiedler(a) != fiedler(b)) {
        return fiedler(a) < fiedler(b);
      }
      return a < b;
    });

    // sweep: prefix of the sorted Fiedler entries versus the rest
    double best = kInf;
    int best_cut = 1;
    std::vector<char> side(na, 0);
    for (int t = 1; t < na; ++t) {
      side[order[t - 1]] = 1;
      double cut = 0.0;
      double vol_a = 0.0;
      double vol_b = 0.0;
      for (int a = 0; a < na; ++a) {
        (side[a] ? vol_a : vol_b) += dega(a);
        if (!side[a]) {
          continue;
        }
        for (int b = 0; b < na; ++b) {
          if (!side[b]) {
            cut += wa(a, b);
          }
        }
      }
      if (vol_a <= 0.0 || vol_b <= 0.0) {
        continue;
      }
      const double ncut = cut * (1.0 / vol_a + 1.0 / vol_b);
      if (ncut < best) {
        best = ncut;
        best_cut = t;
      }
    }
    for (int t = 0; t < best_cut; ++t) {
      in_a[active[order[t]]] = 1;
    }
    out.cut_weight = std::isfinite(best) ? best : 0.0;
  }

  // park isolated vertices on the smaller side, lowest index first
  if (!isolated.empty() && active.size() >= 2) {
    int count_a = 0;
    for (int t : active) {
      count_a += in_a[t];
    }
    int count_b = static_cast<int>(active.size()) - count_a;
    for (int a : isolated) {
      if (count_a <= count_b) {
        in_a[a] = 1;
        ++count_a;
      } else {
        ++count_b;
      }
    }
  }

  for (int t = 0; t < m; ++t) {
    (in_a[t] ? out.part_a : out.part_b).push_back(u[t]);
  }
  if (out.part_a.empty() || out.part_b.empty()) {
    // pathological balance: force a deterministic nonempty split
    out.part_a.clear();
    out.part_b.clear();
    out.part_a.push_back(u[0]);
    for (int t = 1; t < m; ++t) {
      out.part_b.push_back(u[t]);
    }
  }
  return out;
}

namespace {

struct WorkingState {
  VariationalState state;
  SymMatrix omega;
  double bound = -kInf;
  bool solver_ok = true;
};

SymMatrix fit_omega(const SampleStats& stats, const VariationalState& state,
                    const PenaltyConfig& c, const SearchOptions& opts, bool* ok) {
  // structure fitting always works on the posterior scale: prior rates under
  // the N/2 likelihood factor
  FitResult fit;
  if (state.kind == PriorKind::gl1) {
    const SymMatrix lam = expected_entry_penalties(state.phi, c);
    fit = fit_l1(stats.scatter, lam, stats.n, opts.solver);
  } else {
    fit = fit_gl12(stats.scatter, Partition(state.z), c, stats.n, opts.solver);
  }
  if (ok != nullptr) {
    *ok = fit.converged || fit.gap <= 100.0 * opts.solver.tol;
  }
  return fit.omega;
}

double state_bound(const SymMatrix& omega, const VariationalState& state,
                   const SampleStats& stats, const PenaltyConfig& c, const SearchOptions& opts) {
  if (state.kind == PriorKind::gl1) {
    return elbo_gl1(omega, state, stats, c, opts.prior);
  }
  return objective_gl12(omega, Partition(state.z), state.alpha, stats, c, opts.prior);
}

// alternate (omega, alpha, phi or z) updates until the bound settles
void run_cycles(WorkingState& ws, const SampleStats& stats, const PenaltyConfig& c,
                const SearchOptions& opts) {
  double prev = -kInf;
  for (int cycle = 0; cycle < opts.max_cycles; ++cycle) {
    bool ok = true;
    ws.omega = fit_omega(stats, ws.state, c, opts, &ok);
    if (!ok) {
      ws.solver_ok = false;
    }
    ws.state.alpha = update_alpha(ws.state, c, opts.prior);
    if (ws.state.kind == PriorKind::gl1) {
      ws.state.phi = update_phi(ws.state, ws.omega, c);
    } else {
      const Partition z_new = update_z_local(Partition(ws.state.z), ws.omega, ws.state.alpha,
                                             stats, c, opts.prior);
      // the pass returns canonical labels, which may renumber groups (and
      // drop drained ones); rebuild alpha so indices stay aligned
      ws.state.z = z_new.labels();
      ws.state.alpha = Eigen::VectorXd::Ones(z_new.groups());
      ws.state.alpha = update_alpha(ws.state, c, opts.prior);
    }
    ws.bound = state_bound(ws.omega, ws.state, stats, c, opts);
    if (std::abs(ws.bound - prev) <= opts.cycle_tol * (1.0 + std::abs(ws.bound))) {
      break;
    }
    prev = ws.bound;
  }
}

// build the trial state with group `group`'s members re-labelled by the split
VariationalState split_state(const VariationalState& state, const Partition& hard, int group,
                             const SplitProposal& split, const PenaltyConfig& c,
                             const SearchOptions& opts) {
  VariationalState trial = state;
  const int k_new = state.groups() + 1;
  if (state.kind == PriorKind::gl1) {
    // members of the split group become hard rows: part_a keeps the group's
    // dominant column, part_b moves to the appended column
    const int d = state.dim();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(d, k_new);
    phi.leftCols(state.groups()) = state.phi;
    Eigen::Index source_col = 0;
    state.phi.row(split.part_a.front()).maxCoeff(&source_col);
    for (int i : split.part_a) {
      phi.row(i).setZero();
      phi(i, source_col) = 1.0;
    }
    for (int i : split.part_b) {
      phi.row(i).setZero();
      phi(i, k_new - 1) = 1.0;
    }
    trial.phi = phi;
    trial.alpha = Eigen::VectorXd::Ones(k_new);  // placeholder until the update
    trial.alpha = update_alpha(trial, c, opts.prior);
  } else {
    for (int i : split.part_b) {
      trial.z[i] = k_new - 1;
    }
    // canonicalize so labels and alpha stay index-aligned
    trial.z = Partition(trial.z).labels();
    trial.alpha = Eigen::VectorXd::Ones(k_new);
    trial.alpha = update_alpha(trial, c, opts.prior);
  }
  (void)hard;
  (void)group;
  return trial;
}

struct Candidate {
  int group = -1;
  SplitProposal split;
  double sort_key = kInf;  // cut weight over group size
  double score = -kInf;    // exhaustive mode: bound after the approximate update
  WorkingState trial;      // exhaustive mode: state used for scoring
  bool valid = false;
};

std::vector<Candidate> collect_candidates(const Partition& hard, const SymMatrix& omega) {
  std::vector<Candidate> out;
  const auto sizes = hard.sizes();
  for (int g = 0; g < hard.groups(); ++g) {
    if (sizes[g] < 2) {
      continue;
    }
    Candidate cand;
    cand.group = g;
    cand.split = propose_split(hard, g, omega);
    cand.sort_key = cand.split.cut_weight / sizes[g];
    cand.valid = true;
    out.push_back(std::move(cand));
  }
  return out;
}

SearchReport run_search(const SampleStats& stats, const PenaltyConfig& c,
                        const SearchOptions& opts, bool exhaustive) {
  c.validate();
  if (stats.n < 2 || stats.dim < 1) {
    throw InvalidInputError("search: need stats with n >= 2");
  }

  SearchReport report;
  WorkingState cur;
  cur.state = VariationalState::single_group(opts.kind, stats.dim, c, opts.prior);
  run_cycles(cur, stats, c, opts);
  if (!cur.solver_ok) {
    report.termination = "solver_failure";
  }

  report.trajectory.push_back({0, -1, {}, {}, cur.bound});

  int step = 0;
  while (report.termination.empty()) {
    if (step >= opts.max_splits) {
      report.termination = "max_splits";
      break;
    }
    ++report.rounds;
    const Partition hard = cur.state.hard_partition();
    std::vector<Candidate> candidates = collect_candidates(hard, cur.omega);
    if (candidates.empty()) {
      report.termination = "no_improving_split";
      break;
    }

    bool accepted = false;
    if (!exhaustive) {
      // cheapest normalized cut per variable first; accept the first winner
      std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.sort_key != b.sort_key) {
          return a.sort_key < b.sort_key;
        }
        return a.group < b.group;
      });
      for (Candidate& cand : candidates) {
        WorkingState trial;
        trial.state = split_state(cur.state, hard, cand.group, cand.split, c, opts);
        run_cycles(trial, stats, c, opts);
        if (!trial.solver_ok) {
          report.termination = "solver_failure";
          break;
        }
        if (trial.bound > cur.bound) {
          cur = std::move(trial);
          ++step;
          report.trajectory.push_back(
              {step, cand.group, cand.split.part_a, cand.split.part_b, cur.bound});
          accepted = true;
          break;
        }
      }
    } else {
      // score all splits with the row-restricted refit, then fully refit the
      // winner
      const int n_cand = static_cast<int>(candidates.size());
      const std::vector<std::vector<int>> groups = hard.members();
#pragma omp parallel for schedule(dynamic) if (opts.parallel_scoring)
      for (int idx = 0; idx < n_cand; ++idx) {
        Candidate& cand = candidates[idx];
        try {
          WorkingState trial;
          trial.state = split_state(cur.state, hard, cand.group, cand.split, c, opts);
          const std::vector<int>& rows = groups[cand.group];
          DualRadii radii;
          if (opts.kind == PriorKind::gl1) {
            radii = l1_radii(expected_entry_penalties(trial.state.phi, c), stats.n);
          } else {
            radii = gl12_radii(Partition(trial.state.z), c, stats.n);
          }
          trial.omega = partial_refit(cur.omega, stats.scatter, rows, radii, opts.solver);
          trial.bound = state_bound(trial.omega, trial.state, stats, c, opts);
          cand.score = trial.bound;
          cand.trial = std::move(trial);
        } catch (...) {
          cand.valid = false;
          cand.score = -kInf;
        }
      }
      // deterministic winner: score, then group id, then label sequence
      int best = -1;
      for (int idx = 0; idx < n_cand; ++idx) {
        if (!candidates[idx].valid) {
          continue;
        }
        if (best < 0 || candidates[idx].score > candidates[best].score) {
          best = idx;
        }
      }
      if (best >= 0) {
        Candidate& cand = candidates[best];
        WorkingState trial;
        trial.state = cand.trial.state;
        run_cycles(trial, stats, c, opts);
        if (!trial.solver_ok) {
          report.termination = "solver_failure";
        } else if (trial.bound > cur.bound) {
          cur = std::move(trial);
          ++step;
          report.trajectory.push_back(
              {step, cand.group, cand.split.part_a, cand.split.part_b, cur.bound});
          accepted = true;
        }
      }
    }

    if (!accepted && report.termination.empty()) {
      report.termination = "no_improving_split";
    }
  }

  report.final_partition = cur.state.hard_partition();
  report.final_omega = cur.omega;
  report.final_state = cur.state;
  report.final_bound = cur.bound;
  return report;
}

}  // namespace

SearchReport greedy_search(const SampleStats& stats, const PenaltyConfig& c,
                           const SearchOptions& opts) {
  return run_search(stats, c, opts, false);
}

SearchReport exhaustive_search(const SampleStats& stats, const PenaltyConfig& c,
                               const SearchOptions& opts) {
  return run_search(stats, c, opts, true);
}

}  // namespace blockprec
