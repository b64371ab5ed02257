#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qam/compose.hpp"
#include "qam/error.hpp"
#include "qam/parallel.hpp"
#include "qam/qarf.hpp"
#include "qam/random.hpp"
#include "qam/spacetime.hpp"

using namespace qam;

namespace {

QarfSpec separable_spec() {
  QarfSpec s;
  s.exponents = {ExponentFunction::linear(), ExponentFunction::linear()};
  s.measure = MixingMeasure::point_mass(1.0);
  return s;
}

// lambda1 < lambda2, lambda3: gamma(1/lambda1, 1) mixing recovers the Clayton family.
QarfSpec clayton_spec(double l1, double l2, double l3, std::size_t d) {
  QarfSpec s;
  s.exponents = {ExponentFunction::shifted_power(1.0, l1 / l2), ExponentFunction::shifted_power(1.0, l1 / l3)};
  s.partition = {d, 1};
  s.measure = MixingMeasure::gamma(1.0 / l1, 1.0);
  return s;
}

}  // namespace

TEST_CASE("exponent functions") {
  CHECK(ExponentFunction::linear(2.0)(1.5) == 3.0);
  CHECK(ExponentFunction::power(1.0, 0.5)(4.0) == 2.0);
  CHECK(ExponentFunction::log1p(2.0)(std::numbers::e - 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ExponentFunction::shifted_power(1.0, 0.5)(3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(ExponentFunction::power(1.0, 1.5), ParameterError);
  CHECK_THROWS_AS(ExponentFunction::linear(0.0), ParameterError);
  const auto e = ExponentFunction::from_generator(Generator(GeneratorKind::exp_neg), kernels::exponential(1.0, 2.0));
  CHECK(e(0.7) == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("qarf spec validation") {
  auto s = separable_spec();
  CHECK_NOTHROW(s.validate());
  s.exponents[0] = ExponentFunction::callable("t^2", [](double t) { return t * t; });
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("concave"), ParameterError);
  s.exponents[0] = ExponentFunction::callable("1+t", [](double t) { return 1.0 + t; });
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("nu(0) = 0"), ParameterError);
  s.exponents[0] = ExponentFunction::log1p(0.8);  // (1+t)^{-0.8}
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("integrable"), ParameterError);
  s.exponents[0] = ExponentFunction::log1p(1.3);
  CHECK_NOTHROW(s.validate());
  s = separable_spec();
  s.measure = MixingMeasure::lebesgue();
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = separable_spec();
  s.partition = {1, 2};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("time block"), ParameterError);
  s = separable_spec();
  s.variance = -1.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
}

TEST_CASE("theoretical covariance") {
  const auto s = separable_spec();
  CHECK(theoretical_cov(s, std::vector<double>{0.0}, 0.0) == 1.0);
  CHECK(theoretical_cov(s, std::vector<double>{0.5}, -1.25) == doctest::Approx(std::exp(-1.75)).epsilon(1e-15));

  QarfSpec three;
  three.exponents = {ExponentFunction::linear(), ExponentFunction::linear(), ExponentFunction::linear()};
  const std::vector<double> lag{0.3, -0.2, 0.9};
  CHECK(theoretical_cov(three, lag) == doctest::Approx(std::exp(-1.4)).epsilon(1e-15));
  CHECK_THROWS_AS(theoretical_cov(three, std::vector<double>{1.0}), DomainError);

  // C(0, 0) = total mass times variance
  QarfSpec g = clayton_spec(0.5, 1.0, 2.0, 2);
  g.variance = 2.5;
  CHECK(theoretical_cov(g, std::vector<double>{0.0, 0.0}, 0.0) == 2.5);
}

TEST_CASE("gamma mixing reproduces the Clayton family") {
  StreamRng rng(21, 0, 0);
  for (auto [l1, l2, l3] : {std::tuple{0.5, 1.0, 2.0}, std::tuple{0.3, 0.7, 0.4}}) {
    const auto spec = clayton_spec(l1, l2, l3, 2);
    const auto k = clayton(l1, l2, l3, 1.0, 2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const std::vector<double> h{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
      const double u = 6.0 * rng.uniform() - 3.0;
      worst = std::max(worst, std::abs(theoretical_cov(spec, h, u) - k(h, u)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("independent components give a separable covariance") {
  QarfSpec s = clayton_spec(0.5, 1.0, 2.0, 1);
  s.independent = {MixingMeasure::gamma(2.0, 1.0), MixingMeasure::gamma(3.0, 2.0)};
  const std::vector<double> h{0.7};
  const double c00 = theoretical_cov(s, std::vector<double>{0.0}, 0.0);
  const double sep = theoretical_cov(s, h, 0.0) * theoretical_cov(s, std::vector<double>{0.0}, 1.3) / c00;
  CHECK(theoretical_cov(s, h, 1.3) == doctest::Approx(sep).epsilon(1e-14));
  // the line-concentrated version is not separable
  s.independent.clear();
  const double c0 = theoretical_cov(s, std::vector<double>{0.0}, 0.0);
  CHECK(std::abs(theoretical_cov(s, h, 1.3) - theoretical_cov(s, h, 0.0) * theoretical_cov(s, std::vector<double>{0.0}, 1.3) / c0) >
        1e-3);
}

TEST_CASE("variance ordering: arithmetic composition has the largest variance") {
  // bounded children with distinct C_i(0), shared weights theta = (0.3, 0.7)
  const std::vector<Kernel> children{kernels::exponential(0.6), kernels::gaussian(0.9)};
  const Weights w{{0.3, 0.7}};
  const double arith = 0.3 * 0.6 + 0.7 * 0.9;
  for (const auto& e : catalog()) {
    if (!e.completely_monotone) continue;
    std::vector<double> params;
    if (e.kind == GeneratorKind::clayton) params = {0.5};
    if (e.kind == GeneratorKind::gumbel) params = {2.0};
    if (e.kind == GeneratorKind::power_series) params = {2.0};
    if (e.kind == GeneratorKind::frank) params = {1.5};
    if (e.kind == GeneratorKind::power_law) params = {1.0};
    CompositionSpec spec{Generator(e.kind, params), children, w, {}, WeightRule::unconstrained};
    const double c0 = compose(spec).eval(std::vector<double>{0.0, 0.0});
    INFO(e.name);
    CHECK(c0 <= arith + 1e-12);
  }
}

TEST_CASE("simulation determinism and parallel agreement") {
  auto s = clayton_spec(0.5, 1.0, 2.0, 2);
  const auto pts = PointSet::unit_cube(40, 3, 4);
  const auto a = simulate(s, pts, 300, 17);
  const auto b = simulate(s, pts, 300, 17);
  const auto c = simulate_serial(s, pts, 300, 17);
  CHECK(a == b);
  CHECK(a == c);
  set_thread_limit(1);
  CHECK(simulate(s, pts, 300, 17) == a);
  set_thread_limit(0);
  CHECK(simulate(s, pts, 300, 18) != a);
  CHECK_THROWS_AS(simulate(s, pts, 0, 1), ParameterError);
  CHECK_THROWS_AS(simulate(s, PointSet::unit_cube(5, 2, 0), 10, 1), DomainError);
  s.independent = {MixingMeasure::gamma(2.0, 1.0), MixingMeasure::gamma(2.0, 1.0)};
  CHECK_THROWS_AS(simulate(s, pts, 10, 1), ParameterError);
}

TEST_CASE("Monte Carlo covariance of the separable point-mass field") {
  const auto s = separable_spec();
  const PointSet pts(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
  const auto t0 = std::chrono::steady_clock::now();
  const auto x = simulate(s, pts, 200000, 2024);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 120.0);
  const double truth[] = {1.0, std::exp(-1.0), std::exp(-1.0)};
  for (std::size_t j = 0; j < 3; ++j) {
    const auto e = empirical_covariance(x, 0, j);
    INFO("lag " << j << ": " << e.value << " +- " << e.se);
    CHECK(std::abs(e.value - truth[j]) <= 3.0 * e.se);
  }
}

TEST_CASE("Monte Carlo covariance under gamma and discrete mixing") {
  for (const auto& m : {MixingMeasure::gamma(2.0, 1.0), MixingMeasure::discrete({0.5, 2.0}, {0.6, 0.9})}) {
    QarfSpec s;
    s.exponents = {ExponentFunction::power(1.0, 0.5), ExponentFunction::linear(0.5)};
    s.measure = m;
    const PointSet pts(2, {0.0, 0.0, 0.8, 0.0, 0.0, 1.5, 0.8, 1.5});
    const auto x = simulate(s, pts, 40000, 5);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const std::vector<double> lag{pts[j][0], pts[j][1]};
      const auto e = empirical_covariance(x, 0, j);
      INFO(m.name() << " point " << j << ": " << e.value << " +- " << e.se);
      CHECK(std::abs(e.value - theoretical_cov(s, lag)) <= 4.0 * e.se);
    }
  }
}

TEST_CASE("spectral density") {
  const std::vector<double> w{0.0, 0.25, 1.0, 7.5, 60.0, 900.0};
  const auto d = spectral_density_1d(ExponentFunction::linear(), 1.0, w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(d[i] == doctest::Approx(1.0 / (std::numbers::pi * (1 + w[i] * w[i]))).epsilon(1e-9));
  }
  // r scales the exponential: (1/pi) r / (r^2 + w^2)
  const auto d2 = spectral_density_1d(ExponentFunction::linear(), 2.5, w);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(d2[i] == doctest::Approx(2.5 / (std::numbers::pi * (6.25 + w[i] * w[i]))).epsilon(1e-9));
  }
  const auto s = spectral_density_1d(ExponentFunction::power(1.0, 0.5), 1.0, w);
  CHECK(s[0] == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-9));  // int e^{-sqrt h} = 2
  for (double v : s) CHECK(v > 0.0);
  CHECK_THROWS_AS(spectral_density_1d(ExponentFunction::linear(), 1.0, std::vector<double>{-1.0}), DomainError);
  CHECK_THROWS_AS(spectral_density_1d(ExponentFunction::linear(), 0.0, w), ParameterError);
}

TEST_CASE("mean-square differentiability classifier") {
  QarfSpec s;
  s.exponents = {ExponentFunction::linear()};
  s.temporal = false;
  const auto r = ms_diff_order(s, 0, 2);
  REQUIRE(r.moments.size() == 3);
  CHECK(r.moments[0].finite);
  CHECK(r.moments[0].value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(r.moments[1].finite);
  CHECK_FALSE(r.moments[2].finite);
  CHECK(r.differentiable_order == 0);
  CHECK(r.probe_finite);
  CHECK(r.probe.size() == 1);

  const auto again = ms_diff_order_serial(s, 0, 2);
  CHECK(again.moments[0].partial_sums == r.moments[0].partial_sums);
  CHECK(again.moments[1].finite == r.moments[1].finite);

  s.exponents = {ExponentFunction::power(1.0, 0.5)};
  const auto q = ms_diff_order(s, 0, 1);
  CHECK(q.moments[0].finite);
  CHECK(q.moments[0].value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(q.moments[1].finite);

  // gamma-mixed: total spectral mass is C(0) = variance
  s.exponents = {ExponentFunction::linear()};
  s.measure = MixingMeasure::gamma(2.0, 1.0);
  s.variance = 1.5;
  const auto g = ms_diff_order(s, 0, 1);
  CHECK(g.moments[0].value == doctest::Approx(1.5).epsilon(1e-6));
  CHECK_FALSE(g.moments[1].finite);
  CHECK(g.probe.size() == 3);

  CHECK_THROWS_AS(ms_diff_order(s, 3, 1), ParameterError);
  CHECK_THROWS_AS(ms_diff_order(s, 0, -1), ParameterError);
}
