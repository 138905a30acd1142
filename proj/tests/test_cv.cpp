#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blockprec/cv.hpp"

using namespace blockprec;

namespace {

Dataset blocky_data(std::uint64_t seed) {
  SynthSpec spec;
  spec.group_sizes = {4, 4};
  spec.n = 90;
  spec.within = 0.45;
  spec.seed = seed;
  return synth_blocks(spec).data;
}

}  // namespace

TEST_CASE("grid values and the constraint chain") {
  GridOptions grid;
  const std::vector<double> values = penalty_grid_values(grid);
  REQUIRE(values.size() == 10);
  CHECK(values.front() == doctest::Approx(1e4));
  CHECK(values.back() == doctest::Approx(1.0));
  // equally spaced on a log scale, descending
  const double ratio = values[0] / values[1];
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    CHECK(values[k] / values[k + 1] == doctest::Approx(ratio).epsilon(1e-12));
  }

  const std::vector<PenaltyConfig> triples = constrained_triples(grid, 1.0);
  // independent combinatorial count of the constraint
  int count = 0;
  for (double ld : values) {
    for (double l1 : values) {
      for (double l0 : values) {
        if (l0 > l1 && l1 > 0.5 * ld) {
          ++count;
        }
      }
    }
  }
  CHECK(static_cast<int>(triples.size()) == count);
  for (const PenaltyConfig& c : triples) {
    CHECK(c.satisfies_grid_constraint());
  }
}

TEST_CASE("median helper") {
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
}

TEST_CASE("tikhonov-only cross validation runs end to end") {
  const Dataset data = blocky_data(1);
  CvOptions opts;
  opts.seed = 9;
  opts.grid.points = 6;
  const CvReport report = cross_validate(data, {Method::tikhonov}, opts);

  REQUIRE(report.methods.size() == 1);
  REQUIRE(report.methods[0].folds.size() == 5);
  for (const FoldResult& fr : report.methods[0].folds) {
    CHECK(std::isfinite(fr.test_loglik));
    CHECK(fr.selected.lambda_d > 0.0);
  }

  // the folds partition the rows exactly
  std::vector<int> seen(data.n(), 0);
  for (const auto& fold : report.fold_test_indices) {
    for (int idx : fold) {
      ++seen[idx];
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST_CASE("cv is deterministic and parallelism does not change results") {
  const Dataset data = blocky_data(2);
  CvOptions opts;
  opts.seed = 4;
  opts.grid.points = 5;
  const std::vector<Method> methods = {Method::tikhonov, Method::il1};

  const CvReport a = cross_validate(data, methods, opts);
  CvOptions serial = opts;
  serial.parallel_grid = false;
  const CvReport b = cross_validate(data, methods, serial);

  for (std::size_t m = 0; m < methods.size(); ++m) {
    CHECK(a.methods[m].median_test_loglik == b.methods[m].median_test_loglik);
    for (int f = 0; f < 5; ++f) {
      CHECK(a.methods[m].folds[f].test_loglik == b.methods[m].folds[f].test_loglik);
      CHECK(a.methods[m].folds[f].selected.lambda_d == b.methods[m].folds[f].selected.lambda_d);
    }
  }
}

TEST_CASE("structure-aware methods see blocky data better than Tikhonov") {
  SynthSpec spec;
  spec.group_sizes = {4, 4};
  spec.n = 120;
  spec.within = 0.45;
  spec.seed = 5;
  const SynthResult synth = synth_blocks(spec);

  CvOptions opts;
  opts.seed = 13;
  opts.grid.points = 5;
  opts.known_groups = synth.planted;
  const CvReport report =
      cross_validate(synth.data, {Method::tikhonov, Method::il1, Method::gl12_known}, opts);

  const double t = report.methods[0].median_test_loglik;
  const double il1 = report.methods[1].median_test_loglik;
  const double known = report.methods[2].median_test_loglik;
  CHECK(il1 >= t);
  CHECK(known >= il1);
}

TEST_CASE("method name round trip") {
  for (Method m : {Method::tikhonov, Method::il1, Method::gl12_known, Method::gl1_greedy,
                   Method::gl1_exhaustive, Method::gl12_greedy, Method::gl12_exhaustive}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK_THROWS(method_from_name("nope"));
}
