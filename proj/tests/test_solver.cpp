#include <doctest.h>

#include <cmath>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"
#include "blockprec/solver.hpp"
#include "test_support.hpp"

using namespace blockprec;

namespace {

SymMatrix make2(double a, double b, double c) {
  SymMatrix m(2);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 1, c);
  return m;
}

SymMatrix uniform_penalties(int d, double diag, double off) {
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    out.set(i, i, diag);
    for (int j = i + 1; j < d; ++j) {
      out.set(i, j, off);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tikhonov closed forms") {
  {
    const SymMatrix r = tikhonov(SymMatrix::identity(3), 0.5);
    for (int i = 0; i < 3; ++i) {
      CHECK(r(i, i) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
  }
  {
    const SymMatrix r = tikhonov(SymMatrix::zero(2), 1.0);
    CHECK(r(0, 0) == doctest::Approx(1.0));
    CHECK(r(0, 1) == doctest::Approx(0.0));
  }
  {
    SymMatrix s(2);
    s.set(0, 0, 1.0);
    s.set(1, 1, 3.0);
    const SymMatrix r = tikhonov(s, 1.0);
    CHECK(r(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tikhonov(SymMatrix::zero(2), 0.0), DomainError);
}

TEST_CASE("fit_l1 with diagonal-only penalties recovers the closed form") {
  RandomStream rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 3 + static_cast<int>(rng.next_u64() % 10);
    const SymMatrix s = testsupport::random_pd(d, rng);
    const double lam = 0.2 + rng.next_uniform();
    const FitResult fit = fit_l1(s, uniform_penalties(d, lam, 0.0));
    REQUIRE(fit.converged);
    const SymMatrix expected = tikhonov(s, lam);
    CHECK((fit.omega.dense() - expected.dense()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fit_l1 two-variable dual soft threshold") {
  const SymMatrix s = make2(1.0, 0.5, 1.0);
  SymMatrix pen(2);
  pen.set(0, 1, 0.2);

  // brute-force oracle over the single free dual coordinate W_12
  double best_w = 0.0;
  double best_val = -1e300;
  for (double w = 0.3; w <= 0.7; w += 1e-6) {
    const double val = std::log(1.0 - w * w);
    if (std::abs(w - 0.5) <= 0.2 && val > best_val) {
      best_val = val;
      best_w = w;
    }
  }
  CHECK(best_w == doctest::Approx(0.3).epsilon(1e-5));

  const FitResult fit = fit_l1(s, pen);
  REQUIRE(fit.converged);
  CHECK(fit.sigma(0, 1) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fit.omega(0, 0) == doctest::Approx(1.0989).epsilon(1e-3));
  CHECK(fit.omega(0, 1) == doctest::Approx(-0.32967).epsilon(1e-3));
}

TEST_CASE("huge off-diagonal penalties produce a numerically diagonal estimate") {
  RandomStream rng(33);
  const SymMatrix s = testsupport::random_pd(5, rng);
  const double big = 1e3 * s.dense().cwiseAbs().maxCoeff();
  const FitResult fit = fit_l1(s, uniform_penalties(5, 0.5, big));
  REQUIRE(fit.converged);
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      CHECK(std::abs(fit.omega(i, j)) < 1e-8);
    }
  }
}

TEST_CASE("fit_gl12 agrees with fit_l1 on degenerate partitions") {
  RandomStream rng(55);
  const PenaltyConfig c{0.5, 0.3, 0.9, 1.0};
  for (int d : {3, 5}) {
    const SymMatrix s = testsupport::random_pd(d, rng);
    {
      const Partition p = Partition::singletons(d);
      const FitResult a = fit_gl12(s, p, c);
      const FitResult b = fit_l1(s, entry_penalties(p, c));
      CHECK((a.omega.dense() - b.omega.dense()).cwiseAbs().maxCoeff() < 1e-5);
    }
    {
      const Partition p = Partition::single_group(d);
      const FitResult a = fit_gl12(s, p, c);
      const FitResult b = fit_l1(s, entry_penalties(p, c));
      CHECK((a.omega.dense() - b.omega.dense()).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("strong between-block penalty zeroes whole blocks with a valid certificate") {
  RandomStream rng(66);
  // two planted blocks with mild coupling in S
  const int d = 6;
  const Partition p({0, 0, 0, 1, 1, 1});
  SymMatrix s = testsupport::random_pd(d, rng, 1.0);
  const PenaltyConfig c{0.4, 0.05, 2.0, 1.0};
  const FitResult fit = fit_gl12(s, p, c);
  REQUIRE(fit.converged);
  double max_between = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 3; j < 6; ++j) {
      max_between = std::max(max_between, std::abs(fit.omega(i, j)));
    }
  }
  CHECK(max_between < 1e-7);
  // block-KKT at the zero block: ||(Omega^{-1} - S)_block||_2 <= C_kl * l0
  const DualRadii radii = gl12_radii(p, c);
  CHECK(kkt_residual(fit.omega, s, radii) < 1e-5);
}

TEST_CASE("kkt_residual certifies and rejects") {
  RandomStream rng(77);
  const int d = 6;
  const SymMatrix s = testsupport::random_pd(d, rng);
  const double lam = 0.8;
  const SymMatrix pen = uniform_penalties(d, lam, 0.0);
  const DualRadii radii = l1_radii(pen);
  const SymMatrix omega = tikhonov(s, lam);
  CHECK(kkt_residual(omega, s, radii) < 1e-8);

  SymMatrix perturbed = omega;
  perturbed.set(0, 1, perturbed(0, 1) + 0.1);
  if (is_pd(perturbed)) {
    CHECK(kkt_residual(perturbed, s, radii) > 1e-3);
  }

  const SymMatrix pen2 = uniform_penalties(d, 0.5, 0.2);
  const FitResult fit = fit_l1(s, pen2);
  REQUIRE(fit.converged);
  CHECK(kkt_residual(fit.omega, s, l1_radii(pen2)) <= 10.0 * 1e-6);
}

TEST_CASE("dual objective is monotone and the estimate stays PD") {
  RandomStream rng(88);
  SolverOptions opts;
  opts.track_objective = true;
  const SymMatrix s = testsupport::random_pd(8, rng);
  const FitResult fit = fit_l1(s, uniform_penalties(8, 0.6, 0.25), 0, opts);
  REQUIRE(fit.converged);
  CHECK(is_pd(fit.omega));
  for (std::size_t k = 1; k < fit.trace.size(); ++k) {
    CHECK(fit.trace[k] >= fit.trace[k - 1] - 1e-12 * (1.0 + std::abs(fit.trace[k])));
  }
}

TEST_CASE("raising every off-diagonal penalty weakly shrinks the off-diagonal mass") {
  RandomStream rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    const SymMatrix s = testsupport::random_pd(10, rng);
    double prev = 1e300;
    for (double off : {0.05, 0.2, 0.8}) {
      const FitResult fit = fit_l1(s, uniform_penalties(10, 0.5, off));
      REQUIRE(fit.converged);
      double mass = 0.0;
      for (int i = 0; i < 10; ++i) {
        for (int j = i + 1; j < 10; ++j) {
          mass += std::abs(fit.omega(i, j));
        }
      }
      CHECK(mass <= prev + 1e-6);
      prev = mass;
    }
  }
}

TEST_CASE("partial_refit restriction semantics") {
  RandomStream rng(111);
  const int d = 6;
  const SymMatrix s = testsupport::random_pd(d, rng);
  const Partition p({0, 0, 1, 1, 2, 2});
  const PenaltyConfig c{0.5, 0.1, 0.8, 1.0};
  const DualRadii radii = gl12_radii(p, c);
  const FitResult start = fit_gl12(s, p, {0.8, 0.4, 1.2, 1.0});

  SUBCASE("empty row set returns the input unchanged") {
    const SymMatrix out = partial_refit(start.omega, s, {}, radii);
    CHECK((out.dense() - start.omega.dense()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("objective never decreases and untouched entries stay put") {
    const std::vector<int> rows = {0, 1};
    const SymMatrix out = partial_refit(start.omega, s, rows, radii);
    CHECK(primal_objective(out, s, radii) >=
          primal_objective(start.omega, s, radii) - 1e-12);
    for (int i = 2; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        CHECK(out(i, j) == start.omega(i, j));
      }
    }
    CHECK(is_pd(out));
  }

  SUBCASE("refitting every row matches the full solver") {
    std::vector<int> all(d);
    for (int i = 0; i < d; ++i) {
      all[i] = i;
    }
    const SymMatrix out = partial_refit(start.omega, s, all, radii);
    const FitResult full = fit_gl12(s, p, c);
    REQUIRE(full.converged);
    CHECK(primal_objective(out, s, radii) ==
          doctest::Approx(primal_objective(full.omega, s, radii)).epsilon(1e-6));
    CHECK((out.dense() - full.omega.dense()).cwiseAbs().maxCoeff() < 1e-4);
  }
}
