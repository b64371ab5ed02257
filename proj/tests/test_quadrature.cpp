#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qam/error.hpp"
#include "qam/quadrature.hpp"

using namespace qam;

TEST_CASE("kronrod 15 is exact for polynomials through degree 22") {
  for (int deg = 0; deg <= 22; ++deg) {
    const auto r = gauss_kronrod15([deg](double x) { return std::pow(x, deg); }, 0.0, 2.0);
    const double exact = std::pow(2.0, deg + 1) / (deg + 1);
    INFO("degree " << deg);
    CHECK(std::abs(r.value - exact) <= 1e-14 * exact);
  }
  // degree 23 is not integrated exactly
  const auto r = gauss_kronrod15([](double x) { return std::pow(x, 23); }, 0.0, 2.0);
  CHECK(std::abs(r.value - std::pow(2.0, 24) / 24) > 1e-10);
}

TEST_CASE("adaptive integration on finite intervals") {
  auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  r = integrate([](double x) { return std::log(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("semi-infinite integrals with endpoint behaviour") {
  // Gamma(0.3) = int tau^{-0.7} e^{-tau}
  auto r = integrate_semi_infinite([](double t) { return std::pow(t, -0.7) * std::exp(-t); }, {}, {-0.7, 0.0});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::tgamma(0.3)).epsilon(1e-9));
  // int 1/(1+t)^2 = 1
  r = integrate_semi_infinite([](double t) { return 1.0 / ((1 + t) * (1 + t)); }, {}, {0.0, 2.0});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  // B(0.5, 1.5) = int t^{-1/2} (1+t)^{-2}
  r = integrate_semi_infinite([](double t) { return std::pow(t, -0.5) / ((1 + t) * (1 + t)); }, {}, {-0.5, 2.5});
  CHECK(r.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
  // no hints: exponential tail map
  r = integrate_semi_infinite([](double t) { return std::exp(-t * t); });
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-10));
  CHECK_THROWS_AS(integrate_semi_infinite([](double) { return 1.0; }, {}, {-1.0, 0.0}), DomainError);
}

TEST_CASE("tolerance halving stays within the error estimate") {
  auto f = [](double t) { return std::pow(t, -0.5) * std::pow(1 + t, -1.2) * std::pow(1 + 0.3 * t, -0.9); };
  const TailHints hints{-0.5, 2.1};
  QuadOptions coarse;
  coarse.rel_tol = 1e-8;
  QuadOptions fine = coarse;
  fine.rel_tol = 5e-9;
  const auto a = integrate_semi_infinite(f, coarse, hints);
  const auto b = integrate_semi_infinite(f, fine, hints);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.value - b.value) <= a.error);
}

TEST_CASE("non-convergence is reported") {
  QuadOptions o;
  o.max_intervals = 3;
  o.rel_tol = 1e-14;
  const auto r = integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, o);
  CHECK_FALSE(r.converged);
  CHECK(r.error > 0.0);
}

TEST_CASE("divergent semi-infinite integrals are not reported as converged") {
  CHECK_FALSE(integrate_semi_infinite([](double t) { return 1.0 / (1.0 + t); }).converged);
  CHECK_FALSE(integrate_semi_infinite([](double t) { return std::log1p(t); }).converged);
  CHECK_FALSE(integrate([](double x) { return 1.0 / (x * x); }, 0.0, 1.0).converged);
}
