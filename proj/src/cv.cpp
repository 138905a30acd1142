#include "blockprec/cv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "blockprec/errors.hpp"
#include "blockprec/rng.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::tikhonov: return "t";
    case Method::il1: return "il1";
    case Method::gl12_known: return "gl12-k";
    case Method::gl1_greedy: return "gl1-ug";
    case Method::gl1_exhaustive: return "gl1-ue";
    case Method::gl12_greedy: return "gl12-ug";
    case Method::gl12_exhaustive: return "gl12-ue";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::tikhonov, Method::il1, Method::gl12_known, Method::gl1_greedy,
                   Method::gl1_exhaustive, Method::gl12_greedy, Method::gl12_exhaustive}) {
    if (method_name(m) == name) {
      return m;
    }
  }
  throw InvalidInputError("unknown method '" + name + "'");
}

std::vector<double> penalty_grid_values(const GridOptions& grid) {
  if (grid.points < 2 || !(grid.top > grid.bottom) || !(grid.bottom > 0.0)) {
    throw InvalidInputError("penalty grid: need points >= 2 and top > bottom > 0");
  }
  std::vector<double> out;
  const double lt = std::log10(grid.top);
  const double lb = std::log10(grid.bottom);
  for (int k = 0; k < grid.points; ++k) {
    out.push_back(std::pow(10.0, lt + (lb - lt) * k / (grid.points - 1)));
  }
  return out;
}

std::vector<PenaltyConfig> constrained_triples(const GridOptions& grid, double alpha_0) {
  const std::vector<double> values = penalty_grid_values(grid);
  std::vector<PenaltyConfig> out;
  for (double ld : values) {
    for (double l1 : values) {
      for (double l0 : values) {
        const PenaltyConfig c{ld, l1, l0, alpha_0};
        if (c.satisfies_grid_constraint()) {
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw InvalidInputError("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::vector<PenaltyConfig> method_candidates(Method m, const GridOptions& grid, double alpha_0) {
  const std::vector<double> values = penalty_grid_values(grid);
  std::vector<PenaltyConfig> out;
  switch (m) {
    case Method::tikhonov:
      for (double ld : values) {
        out.push_back({ld, ld, ld, alpha_0});
      }
      break;
    case Method::il1:
      for (double ld : values) {
        for (double l1 : values) {
          if (l1 > 0.5 * ld) {
            out.push_back({ld, l1, l1, alpha_0});
          }
        }
      }
      break;
    default:
      out = constrained_triples(grid, alpha_0);
      break;
  }
  return out;
}

bool is_structure_method(Method m) {
  return m == Method::gl1_greedy || m == Method::gl1_exhaustive || m == Method::gl12_greedy ||
         m == Method::gl12_exhaustive;
}

SymMatrix fit_method(Method m, const SampleStats& stats, const PenaltyConfig& c,
                     const CvOptions& opts) {
  const int n_eff = opts.absorb_penalties ? 0 : stats.n;
  switch (m) {
    case Method::tikhonov: {
      const double shift =
          opts.absorb_penalties ? c.lambda_d : 2.0 * c.lambda_d / stats.n;
      return tikhonov(stats.scatter, shift);
    }
    case Method::il1: {
      SymMatrix pen(stats.dim);
      for (int i = 0; i < stats.dim; ++i) {
        pen.set(i, i, c.lambda_d);
        for (int j = i + 1; j < stats.dim; ++j) {
          pen.set(i, j, c.lambda_1);
        }
      }
      return fit_l1(stats.scatter, pen, n_eff, opts.solver).omega;
    }
    case Method::gl12_known: {
      if (!opts.known_groups.has_value()) {
        throw InvalidInputError("gl12-k requires known groups");
      }
      return fit_gl12(stats.scatter, *opts.known_groups, c, n_eff, opts.solver).omega;
    }
    default: {
      // structure search always works on the posterior scale: the bound
      // carries the N/2 likelihood factor explicitly
      SearchOptions so = opts.search;
      so.solver = opts.solver;
      so.parallel_scoring = false;  // the grid loop is already parallel
      so.kind = (m == Method::gl1_greedy || m == Method::gl1_exhaustive) ? PriorKind::gl1
                                                                         : PriorKind::gl12;
      const bool greedy = (m == Method::gl1_greedy || m == Method::gl12_greedy);
      const SearchReport report =
          greedy ? greedy_search(stats, c, so) : exhaustive_search(stats, c, so);
      return report.final_omega;
    }
  }
}

}  // namespace

CvReport cross_validate(const Dataset& d, const std::vector<Method>& methods,
                        const CvOptions& opts) {
  const int n = d.n();
  if (n < 10) {
    throw InvalidInputError("cross_validate: need at least 10 rows");
  }
  if (opts.outer_folds < 2 || opts.outer_folds > n) {
    throw InvalidInputError("cross_validate: bad fold count");
  }

  CvReport report;
  report.seed = opts.seed;
  report.candidate_triples = static_cast<int>(constrained_triples(opts.grid, opts.alpha_0).size());

  // one shuffle defines the outer folds and, within each fold, the
  // validation fifth of the training rows
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RandomStream rng = RandomStream::substream(opts.seed, 0);
  for (int k = n - 1; k > 0; --k) {
    const int r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k + 1));
    std::swap(perm[k], perm[r]);
  }
  std::vector<std::vector<int>> folds(opts.outer_folds);
  for (int i = 0; i < n; ++i) {
    folds[i % opts.outer_folds].push_back(perm[i]);
  }
  report.fold_test_indices = folds;

  auto rows_at = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), d.dim());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.row(static_cast<Eigen::Index>(r)) = d.rows.row(idx[r]);
    }
    return out;
  };

  for (Method m : methods) {
    const auto t_method = std::chrono::steady_clock::now();
    MethodReport mr;
    mr.method = m;
    const std::vector<PenaltyConfig> candidates =
        method_candidates(m, opts.grid, opts.alpha_0);

    for (int f = 0; f < opts.outer_folds; ++f) {
      const auto t_fold = std::chrono::steady_clock::now();
      std::vector<int> train;
      for (int g = 0; g < opts.outer_folds; ++g) {
        if (g != f) {
          train.insert(train.end(), folds[g].begin(), folds[g].end());
        }
      }
      const int n_val = std::max(1, static_cast<int>(train.size()) / 5);
      const std::vector<int> val_idx(train.begin(), train.begin() + n_val);
      const std::vector<int> fit_idx(train.begin() + n_val, train.end());

      Dataset fit_part;
      fit_part.rows = rows_at(fit_idx);
      fit_part.names = d.names;
      auto [fit_std, fit_stats] = standardize(fit_part);
      const Eigen::MatrixXd val_rows = rows_at(val_idx);

      const int n_cand = static_cast<int>(candidates.size());
      std::vector<double> scores(n_cand, -kInf);
      int failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures) if (opts.parallel_grid)
      for (int ci = 0; ci < n_cand; ++ci) {
        try {
          const SymMatrix omega = fit_method(m, fit_stats, candidates[ci], opts);
          scores[ci] = heldout_loglik(fit_stats, val_rows, omega);
        } catch (...) {
          scores[ci] = -kInf;
          ++failures;
        }
      }
      mr.failed_candidates += failures;

      int best = 0;
      for (int ci = 1; ci < n_cand; ++ci) {
        if (scores[ci] > scores[best]) {
          best = ci;
        }
      }
      if (!std::isfinite(scores[best])) {
        throw Error("cross_validate: every candidate failed for method " + method_name(m));
      }

      // refit the winner on the full training portion
      Dataset train_part;
      train_part.rows = rows_at(train);
      train_part.names = d.names;
      auto [train_std, train_stats] = standardize(train_part);
      const SymMatrix omega = fit_method(m, train_stats, candidates[best], opts);

      FoldResult fr;
      fr.fold = f;
      fr.selected = candidates[best];
      fr.validation_loglik = scores[best];
      fr.test_loglik = heldout_loglik(train_stats, rows_at(folds[f]), omega);
      fr.wall_seconds = seconds_since(t_fold);
      mr.folds.push_back(fr);
    }

    std::vector<double> tests;
    for (const FoldResult& fr : mr.folds) {
      tests.push_back(fr.test_loglik);
    }
    mr.median_test_loglik = median(tests);
    mr.wall_seconds = seconds_since(t_method);
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace blockprec
