#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "qam/error.hpp"
#include "qam/generators.hpp"
#include "qam/points.hpp"

using namespace qam;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Generator> sample_generators() {
  return {
      Generator(GeneratorKind::exp_neg),
      Generator(GeneratorKind::reciprocal),
      Generator(GeneratorKind::truncated_linear, {2.0}),
      Generator(GeneratorKind::neg_log),
      Generator(GeneratorKind::clayton, {0.5}),
      Generator(GeneratorKind::clayton, {3.0}),
      Generator(GeneratorKind::gumbel, {1.5}),
      Generator(GeneratorKind::power_series, {2.0}),
      Generator(GeneratorKind::frank, {0.5}),
      Generator(GeneratorKind::frank, {5.0}),
      Generator(GeneratorKind::power_law, {0.5}),
  };
}

// 100 points inside inv_domain, log-spaced where the domain is one-sided.
std::vector<double> inverse_grid(const Generator& g) {
  const Interval& d = g.inv_domain();
  if (std::isinf(d.lo)) return linear_grid(-40.0, 40.0, 100);
  const double hi = std::isinf(d.hi) ? 1e6 : d.hi;
  return log_grid(1e-8 * hi, hi, 100);
}

}  // namespace

TEST_CASE("catalog lists the nine kinds with their weight rules") {
  const auto cat = catalog();
  REQUIRE(cat.size() == 9);
  CHECK(cat[0].name == "exp_neg");
  CHECK(cat[0].weight_rule == WeightRule::sum_to_one);
  bool has_m = false;
  for (const auto& e : cat) {
    if (e.kind == GeneratorKind::truncated_linear) has_m = e.param_names == std::vector<std::string>{"M"};
    CHECK(parse_generator_kind(e.name) == e.kind);
  }
  CHECK(has_m);
  CHECK(catalog().size() == cat.size());
}

TEST_CASE("unknown kind names the valid options") {
  try {
    (void)parse_generator_kind("frobnicate");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("clayton") != std::string::npos);
  }
}

TEST_CASE("worked values") {
  Generator c(GeneratorKind::clayton, {1.0});
  CHECK(c.phi(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.phi_inv(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  Generator g(GeneratorKind::gumbel, {2.0});
  CHECK(evaluate(g, Direction::forward, 4.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  Generator e(GeneratorKind::exp_neg);
  CHECK(e.phi(1.0) == std::exp(-1.0));
  CHECK(e.phi_inv(std::exp(-1.0)) == doctest::Approx(1.0));
}

TEST_CASE("parameter bounds are enforced at construction") {
  CHECK_THROWS_WITH_AS(Generator(GeneratorKind::gumbel, {0.5}), doctest::Contains("lambda1 >= 1"),
                       ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::clayton, {0.0}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::power_series, {0.9}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::truncated_linear, {-1.0}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::power_law, {0.0}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::frank, {0.0}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::clayton, {}), ParameterError);
  CHECK_THROWS_AS(Generator(GeneratorKind::exp_neg, {1.0}), ParameterError);
}

TEST_CASE("extended-value conventions are exact") {
  Generator e(GeneratorKind::exp_neg);
  CHECK(evaluate(e, Direction::inverse, 0.0) == kInf);
  CHECK(evaluate(e, Direction::forward, kInf) == 0.0);
  Generator r(GeneratorKind::reciprocal);
  CHECK(evaluate(r, Direction::forward, kInf) == 0.0);
  CHECK(evaluate(r, Direction::forward, 0.0) == kInf);
  CHECK(evaluate(r, Direction::inverse, kInf) == 0.0);
  CHECK(evaluate(r, Direction::inverse, 0.0) == kInf);
  Generator n(GeneratorKind::neg_log);
  CHECK(evaluate(n, Direction::forward, 0.0) == kInf);
  CHECK(evaluate(n, Direction::inverse, kInf) == 0.0);
  Generator c(GeneratorKind::clayton, {2.0});
  CHECK(evaluate(c, Direction::forward, kInf) == 0.0);
  CHECK(evaluate(c, Direction::inverse, 0.0) == kInf);
  CHECK(evaluate(c, Direction::inverse, 1.0) == 0.0);
  Generator p(GeneratorKind::power_law, {0.5});
  CHECK(evaluate(p, Direction::forward, 0.0) == kInf);
  CHECK(evaluate(p, Direction::inverse, kInf) == 0.0);
}

TEST_CASE("domain violations raise") {
  Generator c(GeneratorKind::clayton, {2.0});
  CHECK_THROWS_AS((void)evaluate(c, Direction::inverse, 1.5), DomainError);
  CHECK_THROWS_AS((void)evaluate(c, Direction::forward, -1.0), DomainError);
  Generator p(GeneratorKind::power_law, {0.5});
  CHECK_THROWS_AS((void)evaluate(p, Direction::inverse, 0.0), DomainError);
  Generator t(GeneratorKind::truncated_linear, {1.0});
  CHECK_THROWS_AS((void)evaluate(t, Direction::inverse, 1.5), DomainError);
  CHECK_THROWS_AS((void)evaluate(t, Direction::inverse, std::nan("")), DomainError);
}

TEST_CASE("round trip on 100-point grids") {
  for (const auto& g : sample_generators()) {
    CAPTURE(g.name());
    for (double t : inverse_grid(g)) {
      CAPTURE(t);
      CHECK(std::abs(g.phi(g.phi_inv(t)) - t) <= 1e-12 * std::max(1.0, std::abs(t)));
    }
  }
}

TEST_CASE("completely monotone kinds are strictly decreasing") {
  const auto grid = log_grid(1e-3, 50.0, 100);
  for (const auto& g : sample_generators()) {
    if (!g.completely_monotone()) continue;
    CAPTURE(g.name());
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(g.phi(grid[i]) < g.phi(grid[i - 1]));
  }
}

TEST_CASE("printed Frank form is the negated inverse") {
  const double lambda = 2.0;
  Generator f(GeneratorKind::frank, {lambda});
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(frank_phi_as_printed(lambda, f.phi_inv(t)) == doctest::Approx(-t).epsilon(1e-13));
    CHECK(f.phi(f.phi_inv(t)) == doctest::Approx(t).epsilon(1e-13));
  }
}

TEST_CASE("custom generators carry their own domains") {
  auto sq = Generator::custom(
      "sq", [](double x) { return std::exp(-x * x); }, [](double y) { return std::sqrt(-std::log(y)); },
      {0.0, kInf}, {0.0, 1.0}, false);
  CHECK(sq.kind() == GeneratorKind::custom);
  CHECK(sq.name() == "sq");
  CHECK(sq.phi(sq.phi_inv(0.3)) == doctest::Approx(0.3));
  CHECK_THROWS_AS((void)sq.evaluate(Direction::inverse, 2.0), DomainError);
}
