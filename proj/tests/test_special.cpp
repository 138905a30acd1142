#include <doctest.h>

#include <cmath>

#include "blockprec/errors.hpp"
#include "blockprec/special_functions.hpp"

using namespace blockprec;

TEST_CASE("log_gamma exact points and domain") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0));
  CHECK(log_gamma(2.0) == doctest::Approx(0.0));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("digamma known values") {
  constexpr double euler = 0.57721566490153286060651209008240;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-12));
  CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-12));
  CHECK_THROWS_AS(digamma(0.0), DomainError);
}

TEST_CASE("digamma agrees with central differences of log_gamma") {
  // independent oracle: psi = d/dx lgamma, via 5-point stencil on std::lgamma
  for (double x : {0.003, 0.11, 0.7, 1.3, 4.5, 17.0, 123.0, 9871.0}) {
    const double h = 1e-3 * std::max(1.0, x * 1e-2);
    const double fd = (-std::lgamma(x + 2 * h) + 8 * std::lgamma(x + h) - 8 * std::lgamma(x - h) +
                       std::lgamma(x - 2 * h)) /
                      (12 * h);
    CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-9));
  }
}

TEST_CASE("log_multigamma reduces to log_gamma and satisfies the recursion") {
  CHECK(log_multigamma(3.7, 1) == doctest::Approx(log_gamma(3.7)).epsilon(1e-13));
  // Gamma_2(1) = pi^{1/2} Gamma(1) Gamma(1/2) = pi
  CHECK(log_multigamma(1.0, 2) == doctest::Approx(std::log(M_PI)).epsilon(1e-12));
  // Gamma_d(a) = pi^{(d-1)/2} Gamma(a) Gamma_{d-1}(a - 1/2)
  const double a = 2.25;
  CHECK(log_multigamma(a, 3) ==
        doctest::Approx(0.5 * 2.0 * std::log(M_PI) + log_gamma(a) + log_multigamma(a - 0.5, 2))
            .epsilon(1e-12));
}
