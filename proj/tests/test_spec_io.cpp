#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "qam/csv.hpp"
#include "qam/error.hpp"
#include "qam/spec_io.hpp"

using namespace qam;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "qam_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const char* kSpecs[] = {
    R"({"type": "kernel", "kind": "gaussian", "variance": 2, "scale": 0.5, "dim": 2})",
    R"({"type": "kernel", "kind": "product", "children": [{"kind": "cauchy", "lambda": 1}, {"kind": "spherical", "range": 2, "dim": 3}]})",
    R"({"generator": {"kind": "clayton", "params": [2]}, "children": [{"kind": "exponential"}, {"kind": "gaussian", "dim": 2}],
        "weights": [0.3, 0.7], "partition": [1, 2]})",
    R"({"type": "spacetime", "family": "clayton", "dim": 2, "params": {"lambda1": 0.5, "lambda2": 1, "lambda3": 2}})",
    R"({"type": "spacetime", "family": "gumbel", "dim": 1, "strict": false, "params": {"lambda1": 1, "lambda2": 1, "lambda3": 1}})",
    R"({"type": "spacetime", "family": "frank", "params": {"lambda": 2}, "gs": {"kind": "power", "beta": 1.5},
        "gt": {"kind": "linear", "scale": 0.5}})",
    R"({"type": "spacetime", "family": "cauchy_margin", "dim": 3, "params": {"alpha": 0.5, "delta": 1, "epsilon": 1, "rho": 1}})",
    R"({"type": "spacetime", "family": "separable", "spatial": {"kind": "exponential", "dim": 2}, "temporal": {"kind": "gaussian"}})",
    R"({"type": "mixture", "measure": {"kind": "lebesgue"}, "phi1": {"kind": "power_law", "params": [0.5]},
        "g": {"kind": "cauchy", "alpha": 1, "nu": {"kind": "quadratic", "a": 1, "b": 0.2}},
        "sigma": {"form": "scalar", "dim": 2, "a": 1, "b": 0.1}})",
    R"({"type": "mixture", "measure": {"kind": "gamma", "shape": 2, "rate": 3}, "phi1": {"kind": "exp_neg"},
        "sigma": {"form": "constant", "matrix": [[2, 0.5], [0.5, 1]]}})",
    R"({"type": "qarf", "exponents": [{"kind": "power", "c": 1, "beta": 0.5}, {"kind": "shifted_power", "rho": 0.5}],
        "partition": [2, 1], "measure": {"kind": "discrete", "locations": [0.5, 2], "weights": [0.25, 0.75]}})",
};

}  // namespace

TEST_CASE("spec round trip preserves json and evaluations") {
  for (const std::string text : kSpecs) {
    CAPTURE(text);
    const Spec a = parse_spec_text(text);
    const auto path = scratch("roundtrip.json");
    write_spec(a, path);
    const Spec b = load_spec(path);
    CHECK(a.type() == b.type());
    CHECK(to_json(a) == to_json(b));
    if (a.type() == "mixture") continue;
    const Kernel ka = stationary_kernel(a), kb = stationary_kernel(b);
    REQUIRE(ka.dim() == kb.dim());
    std::vector<double> x(ka.dim());
    for (int r = 0; r < 5; ++r) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = 0.3 * (r + 1) + 0.1 * double(k);
      CHECK(ka.eval(x) == kb.eval(x));
    }
  }
}

TEST_CASE("mixture round trip evaluates identically") {
  const Spec a = parse_spec_text(kSpecs[8]);
  const Spec b = parse_spec(to_json(a));
  const auto& ma = std::get<MixtureConfig>(a.body);
  const auto& mb = std::get<MixtureConfig>(b.body);
  const std::vector<double> s1{0.2, -0.4}, s2{1.0, 0.5};
  CHECK(eval_quadrature(ma.mix, ma.field, s1, s2) == eval_quadrature(mb.mix, mb.field, s1, s2));
}

TEST_CASE("spec errors name the field and the valid options") {
  auto msg = [](const std::string& text) {
    try {
      (void)parse_spec_text(text, "t.json");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg("{\"type\": \"kernel\",\n \"kind\": }").find("line 2") != std::string::npos);
  const auto fam = msg(R"({"type": "spacetime", "family": "clayon", "params": {}})");
  CHECK(fam.find("clayton") != std::string::npos);
  CHECK(fam.find("gumbel") != std::string::npos);
  const auto kind = msg(R"({"type": "kernel", "kind": "matern"})");
  CHECK(kind.find("spec.kind") != std::string::npos);
  CHECK(kind.find("gaussian") != std::string::npos);
  CHECK(msg(R"({"type": "kernel", "kind": "gaussian", "sclae": 1})").find("sclae") != std::string::npos);
  CHECK(msg(R"({"type": "spacetime", "family": "clayton", "params": {"lambda1": 0.5}})").find("lambda2") !=
        std::string::npos);
  CHECK(msg(R"({"generator": {"kind": "clayton", "params": [-1]}, "children": [{"kind": "exponential"}, {"kind": "gaussian"}]})")
            .find("invalid spec") != std::string::npos);
  CHECK(msg(R"({"type": "widget"})").find("qarf") != std::string::npos);
  CHECK(msg(R"([1, 2])") != "no error");
  CHECK_THROWS_AS((void)load_spec(scratch("does_not_exist.json")), ConfigError);
}

TEST_CASE("mixture specs have no stationary kernel") {
  CHECK_THROWS_AS((void)stationary_kernel(parse_spec_text(kSpecs[8])), ConfigError);
}

TEST_CASE("matrix csv format") {
  std::ostringstream os;
  write_matrix(os, Eigen::MatrixXd::Identity(2, 2));
  CHECK(os.str() == "1,0\n0,1\n");
  std::ostringstream os2;
  Eigen::MatrixXd m(1, 3);
  m << 0.1, -2.5e-300, 1e21;
  write_matrix(os2, m);
  CHECK(os2.str() == "0.1,-2.5e-300,1e+21\n");
}

TEST_CASE("point tables round trip") {
  PointSet p(2, {0.1, 0.2, 1.0 / 3.0, -4.0});
  std::ostringstream os;
  write_points(os, {"s1", "t", "value"}, p, {{7.0, 8.5}});
  CHECK(os.str().rfind("s1,t,value\n0.1,0.2,7\n", 0) == 0);

  std::istringstream is("s1,t\n0.1, 0.2\n\n0.3333333333333333,-4\n");
  const auto t = read_points(is);
  CHECK(t.header == std::vector<std::string>{"s1", "t"});
  REQUIRE(t.points.size() == 2);
  CHECK(t.points[1][0] == 1.0 / 3.0);

  std::istringstream bare("1,2\n3,4\n");
  CHECK(read_points(bare).header.empty());
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_WITH_AS((void)read_points(ragged, "p.csv"), doctest::Contains("p.csv:2"), ConfigError);
  std::istringstream junk("1,2\nx,4\n");
  CHECK_THROWS_AS((void)read_points(junk), ConfigError);
  std::istringstream empty("");
  CHECK_THROWS_AS((void)read_points(empty), ConfigError);
}
