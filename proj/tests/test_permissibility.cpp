#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qam/error.hpp"
#include "qam/permissibility.hpp"

using namespace qam;

namespace {

const std::vector<double>& grid64() {
  static const auto g = log_grid(1e-3, 1e3, 64);
  return g;
}

CompositionSpec clayton_spec(double l1, double l2, double l3) {
  return {Generator(GeneratorKind::clayton, {l1}),
          {kernels::cauchy(l2, 3), kernels::cauchy(l3, 1)},
          Weights::ones(2),
          {3, 1},
          WeightRule::trivial_ones};
}

}  // namespace

TEST_CASE("completely monotone check") {
  CHECK(check_completely_monotone([](double t) { return std::exp(-t); }, grid64(), 4).passed);
  CHECK(check_completely_monotone([](double t) { return 1.0 / (1.0 + t); }, grid64(), 4).passed);
  std::vector<double> g{std::numbers::pi, 3.3};
  const auto rep = check_completely_monotone([](double t) { return std::sin(t); }, g, 1);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->order == 0);
  CHECK(rep.witness->location[0] > std::numbers::pi);
  CHECK(rep.worst_margin < -rep.tolerance);
  CHECK_THROWS_AS(check_completely_monotone([](double t) { return std::exp(-t); }, grid64(), 7),
                  ParameterError);
  CHECK_THROWS_AS(check_completely_monotone([](double t) { return std::log(t - 1.0); }, grid64(), 2),
                  NumericError);
}

TEST_CASE("every completely monotone generator passes to order 4") {
  for (const auto& e : catalog()) {
    if (!e.completely_monotone) continue;
    std::vector<double> params;
    if (e.kind == GeneratorKind::gumbel || e.kind == GeneratorKind::power_series) params = {1.7};
    else if (!e.param_names.empty()) params = {0.6};
    const Generator g(e.kind, params);
    CAPTURE(g.name());
    const auto rep = check_completely_monotone([&](double t) { return g.phi(t); }, grid64(), 4);
    CHECK(rep.passed);
    CHECK_FALSE(rep.witness.has_value());
  }
}

TEST_CASE("finite differences converge at second order") {
  const ScalarFn f = [](double t) { return std::exp(-t); };
  for (int n = 1; n <= 3; ++n) {
    const double exact = (n % 2 ? -1.0 : 1.0) * std::exp(-1.0);
    const double e1 = std::abs(central_difference(f, 1.0, n, 0.1) - exact);
    const double e2 = std::abs(central_difference(f, 1.0, n, 0.05) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }
  const auto d = estimate_derivative(f, 2.0, 2);
  CHECK(d.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-7));
}

TEST_CASE("Bernstein check") {
  CHECK(check_bernstein([](double t) { return t; }, grid64(), 4).passed);
  CHECK(check_bernstein([](double t) { return std::pow(1.0 + t, 0.5); }, grid64(), 4).passed);
  const auto rep = check_bernstein([](double t) { return (1.0 + t) * (1.0 + t); }, grid64(), 4);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->order == 2);
}

TEST_CASE("concave increasing check") {
  CHECK(check_concave_increasing([](double t) { return std::sqrt(t); }, grid64()).passed);
  CHECK(check_concave_increasing([](double t) { return 0.7 * std::log1p(t); }, grid64()).passed);
  const auto rep = check_concave_increasing([](double t) { return t * t; }, grid64());
  CHECK_FALSE(rep.passed);
  CHECK(rep.witness->order == 2);
  CHECK_FALSE(check_concave_increasing([](double t) { return -t; }, grid64()).passed);
}

TEST_CASE("variogram CND check") {
  CHECK(check_variogram_cnd([](std::span<const double> h) { return euclidean_norm(h); }, 2).passed);
  CHECK(check_variogram_cnd(
            [](std::span<const double> h) {
              const double r = euclidean_norm(h);
              return r * r;
            },
            3)
            .passed);
  const auto rep = check_variogram_cnd([](std::span<const double> h) { return -euclidean_norm(h); }, 2);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.witness.has_value());
  double s = 0.0;
  for (double a : rep.witness->weights) s += a;
  CHECK(std::abs(s) < 1e-12);
  CHECK(rep.witness->value > 0.0);
  CHECK_THROWS_AS(check_variogram_cnd([](std::span<const double>) { return 0.0; }, 1, {1, 2, 50, 0}),
                  ParameterError);
}

TEST_CASE("gram_psd") {
  const PointSet five = PointSet::unit_cube(5, 2, 1);
  const auto ones = gram_psd(kernels::constant(1.0, 2), five);
  CHECK(ones.n == 5);
  CHECK(ones.max_eigenvalue == doctest::Approx(5.0));
  CHECK(std::abs(ones.min_eigenvalue) < 1e-12);
  CHECK(ones.psd);

  const Kernel sep = kernels::product({kernels::exponential(1.0, 1.0, 3), kernels::exponential(1.0, 1.0, 1)});
  const auto rep = gram_psd(sep, PointSet::unit_cube(50, 4, 2));
  CHECK(rep.min_eigenvalue > 0.0);
  CHECK(rep.psd);

  CHECK_FALSE(gram_psd(kernels::constant(-1.0, 2), five).psd);

  const auto one = gram_psd(kernels::gaussian(2.5, 1.0, 2), PointSet(2, {0.3, 0.4}));
  CHECK(one.min_eigenvalue == 2.5);
  CHECK(one.max_eigenvalue == 2.5);

  PointSet dup(1, {0.0, 1.0, 0.0, 2.0});
  const auto d = gram_psd(kernels::exponential(), dup);
  CHECK(d.n == 3);
  CHECK(d.duplicates_removed == 1);
}

TEST_CASE("gram errors name the pair") {
  const Kernel bad("bad", 1, [](std::span<const double> h) { return h[0] == 0.0 ? 1.0 : NAN; });
  CHECK_THROWS_WITH_AS(gram_psd(bad, PointSet(1, {0.0, 1.0})), doctest::Contains("(0, 1)"), NumericError);
}

TEST_CASE("parallel Gram assembly matches the serial reference exactly") {
  const Kernel k = kernels::product({kernels::cauchy(0.7, 2), kernels::exponential(1.0, 0.3, 1)});
  const PointSet pts = PointSet::unit_cube(120, 3, 4);
  CHECK((gram_matrix(k, pts).array() == gram_matrix_serial(k, pts).array()).all());
}

TEST_CASE("admissibility cases") {
  CHECK(admissibility(clayton_spec(0.5, 1.0, 2.0), AdmissibilityCase::b).passed);

  CompositionSpec sph{Generator(GeneratorKind::exp_neg),
                      {kernels::spherical(1.0, 1), kernels::spherical(2.0, 1)},
                      Weights::equal(2), {}, {}};
  const auto rep = admissibility(sph, AdmissibilityCase::c);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->child == 0);
  CHECK(rep.witness->location[0] >= 1.0);

  CompositionSpec gum{Generator(GeneratorKind::gumbel, {2.0}),
                      {kernels::stretched_exponential(1.0, 2), kernels::stretched_exponential(1.0 / 3.0, 1)},
                      Weights::ones(2), {}, {}};
  CHECK_FALSE(admissibility(gum, AdmissibilityCase::b).passed);

  CompositionSpec geo{Generator(GeneratorKind::exp_neg),
                      {kernels::exponential(1.0, 1.0, 2), kernels::gaussian(1.0, 1.0, 1)},
                      Weights::equal(2), {}, {}};
  CHECK(admissibility(geo, AdmissibilityCase::a).passed);

  CompositionSpec arith{Generator(GeneratorKind::truncated_linear, {1.0}),
                        {kernels::exponential(), kernels::exponential()}, Weights::equal(2), {}, {}};
  CHECK_THROWS_AS(admissibility(arith, AdmissibilityCase::b), ParameterError);
}

TEST_CASE("admissible specs pass the Gram check") {
  const std::vector<CompositionSpec> specs{
      clayton_spec(0.5, 1.0, 2.0), clayton_spec(1.2, 1.5, 3.0),
      {Generator(GeneratorKind::exp_neg),
       {kernels::exponential(1.0, 1.0, 3), kernels::generalized_cauchy(1.0, 0.5, 1)},
       Weights::equal(2), {}, {}}};
  for (const auto& s : specs) {
    REQUIRE(admissibility(s, AdmissibilityCase::b).passed);
    const Kernel k = compose(s);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK(gram_psd(k, PointSet::unit_cube(50, 4, 100 + seed)).psd);
    }
  }
}
