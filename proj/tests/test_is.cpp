#include <doctest.h>

#include <cmath>

#include "blockprec/errors.hpp"
#include "blockprec/model.hpp"

using namespace blockprec;

TEST_CASE("importance sampling hits the exact 2D normalizer") {
  const PenaltyConfig c{1.0, 1.0, 1.5, 1.0};
  const Partition same = Partition::single_group(2);
  const LogZEstimate est = estimate_logz_is(same, c, PriorKind::gl1, 100000, 42);
  const double exact = exact_logz_2d(c, true);
  CHECK(std::abs(est.logz - exact) <= 3.0 * est.std_err);
  CHECK(est.std_err < 0.05);

  const Partition diff({0, 1});
  const LogZEstimate est2 = estimate_logz_is(diff, c, PriorKind::gl1, 100000, 43);
  CHECK(std::abs(est2.logz - exact_logz_2d(c, false)) <= 3.0 * est2.std_err);
}

TEST_CASE("the closed-form bound dominates the estimate") {
  const std::vector<std::pair<Partition, PenaltyConfig>> cases = {
      {Partition({0, 0}), {0.8, 0.8, 1.6, 1.0}},
      {Partition({0, 1}), {1.2, 0.9, 2.0, 1.0}},
      {Partition({0, 0, 1}), {0.6, 0.6, 1.8, 1.0}},
      {Partition({0, 1, 2, 0}), {1.0, 0.7, 1.4, 1.0}},
  };
  std::uint64_t seed = 100;
  for (const auto& [p, c] : cases) {
    for (PriorKind kind : {PriorKind::gl1, PriorKind::gl12}) {
      const LogZEstimate est = estimate_logz_is(p, c, kind, 20000, seed++);
      CHECK(log_bound(kind, p, c) >= est.logz - 3.0 * est.std_err);
    }
  }
}

TEST_CASE("estimator is deterministic given the seed") {
  const PenaltyConfig c{0.9, 0.9, 1.3, 1.0};
  const Partition p({0, 0, 1});
  const LogZEstimate a = estimate_logz_is(p, c, PriorKind::gl12, 5000, 7);
  const LogZEstimate b = estimate_logz_is(p, c, PriorKind::gl12, 5000, 7);
  CHECK(a.logz == b.logz);
  CHECK(a.std_err == b.std_err);
  const LogZEstimate other = estimate_logz_is(p, c, PriorKind::gl12, 5000, 8);
  CHECK(a.logz != other.logz);
}

TEST_CASE("input validation") {
  const PenaltyConfig c{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(estimate_logz_is(Partition({0, 1}), c, PriorKind::gl1, 100, 0),
                  InvalidInputError);
}

TEST_CASE("wishart sampler moments and density normalization") {
  // E[W] = dof * I for identity scale; spot-check the diagonal at D = 3
  RandomStream rng(17);
  const int d = 3;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    mean += sample_wishart_identity(d, d, rng).x.dense();
  }
  mean /= n;
  for (int i = 0; i < d; ++i) {
    CHECK(mean(i, i) == doctest::Approx(static_cast<double>(d)).epsilon(0.05));
    for (int j = 0; j < d; ++j) {
      if (i != j) {
        CHECK(std::abs(mean(i, j)) < 0.15);
      }
    }
  }

  // the logpdf must integrate to one: importance-estimate of a known integral
  // (target = proposal gives weights exactly one)
  const WishartSample w = sample_wishart_identity(d, d, rng);
  const double lp = wishart_identity_logpdf(d, d, w.logdet, w.x.dense().trace());
  CHECK(std::isfinite(lp));
}
