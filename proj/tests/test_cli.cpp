#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "qam/cli.hpp"
#include "qam/csv.hpp"
#include "qam/error.hpp"
#include "qam/version.hpp"

using namespace qam;

namespace {

namespace fs = std::filesystem;

fs::path dir() {
  static const fs::path d = [] {
    auto p = fs::temp_directory_path() / "qam_cli_tests";
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string put(const std::string& name, const std::string& text) {
  const auto p = dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out, err;
};

Result qam_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Eigen::MatrixXd read_matrix(const std::string& text) {
  std::istringstream is(text);
  const auto t = read_points(is);
  Eigen::MatrixXd m(t.points.size(), t.points.dim());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    for (std::size_t j = 0; j < t.points.dim(); ++j) m(i, j) = t.points[i][j];
  }
  return m;
}

const std::string kClayton =
    R"({"type": "spacetime", "family": "clayton", "dim": 2, "params": {"lambda1": 0.5, "lambda2": 1, "lambda3": 2}})";
const std::string kSeparable =
    R"({"type": "spacetime", "family": "separable", "spatial": {"kind": "exponential", "dim": 2}, "temporal": {"kind": "cauchy", "lambda": 1}})";
const std::string kPoints = "s1,s2,t\n0,0,0\n0.5,0.1,1\n1,1,0.3\n0.2,0.9,2\n0.7,0.4,0.5\n";

}  // namespace

TEST_CASE("validate clayton passes and stamps the report") {
  const auto r = qam_run({"validate", "--spec", put("clayton.json", kClayton)});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == true);
  CHECK(j["checks"][0]["check"] == "admissibility_b");
  CHECK(j["tool"] == "qam");
  CHECK(j["version"] == std::string(kVersion));
  CHECK(std::regex_match(j["timestamp"].get<std::string>(), std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}

TEST_CASE("report timestamp honours SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  nlohmann::json j;
  cli::stamp_report(j);
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(j["timestamp"] == "1970-01-02T00:00:00Z");
}

TEST_CASE("validate exits 1 when a check fails") {
  const auto spec = put("harmonic.json", R"({"generator": {"kind": "clayton", "params": [1]},
      "children": [{"kind": "gaussian"}, {"kind": "exponential"}], "weights": [0.5, 0.5], "case": "b"})");
  const auto r = qam_run({"validate", "--spec", spec});
  CHECK(r.code == cli::kCheckFailed);
  CHECK(nlohmann::json::parse(r.out)["passed"] == false);
  CHECK(r.err.find("admissibility_b failed") != std::string::npos);
}

TEST_CASE("gram writes a symmetric n x n csv") {
  const auto out = (dir() / "G.csv").string();
  const auto r = qam_run({"gram", "--spec", put("sep.json", kSeparable), "--points", put("p.csv", kPoints), "--out", out});
  REQUIRE(r.code == cli::kOk);
  const auto text = slurp(out);
  CHECK(text.back() == '\n');
  const Eigen::MatrixXd g = read_matrix(text);
  REQUIRE(g.rows() == 5);
  REQUIRE(g.cols() == 5);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(g(0, 0) == 1.0);
}

TEST_CASE("usage and config errors exit 2") {
  auto r = qam_run({"frobnicate"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);

  r = qam_run({"gram", "--spec", put("broken.json", "{\"type\": \"kernel\",\n\"kind\": ]"), "--grid", "0:1:3"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("line 2") != std::string::npos);

  r = qam_run({"validate", "--spec", put("fam.json", R"({"family": "frankk", "params": {}})")});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("cauchy_margin") != std::string::npos);

  r = qam_run({"gram", "--spec", put("sep.json", kSeparable), "--points", (dir() / "missing.csv").string()});
  CHECK(r.code == cli::kUsage);
  r = qam_run({"gram", "--spec", put("sep.json", kSeparable), "--grid", "0:1:3"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("dimension 3") != std::string::npos);
  r = qam_run({"eval", "--spec", put("sep.json", kSeparable), "--grid", "0:1:0,0:1:2,0:1:2"});
  CHECK(r.code == cli::kUsage);
  r = qam_run({"eval", "--spec", put("sep.json", kSeparable)});
  CHECK(r.code == cli::kUsage);
  r = qam_run({"gram", "--spec", put("sep.json", kSeparable), "--points", put("p.csv", kPoints), "--out",
               (dir() / "no_such_dir" / "G.csv").string()});
  CHECK(r.code == cli::kUsage);
}

TEST_CASE("eval writes a point table over a grid") {
  const auto r = qam_run({"eval", "--spec", put("clayton.json", kClayton), "--grid", "0:1:2,0:0:1,0:2:3"});
  REQUIRE(r.code == cli::kOk);
  std::istringstream is(r.out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "h1,h2,u,value");
  std::istringstream all(r.out);
  const auto t = read_points(all);
  REQUIRE(t.points.size() == 6);
  CHECK(t.points[0][3] == 1.0);
  // C(0, 1) = 2^{-1/2}
  CHECK(t.points[1][3] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("grid parsing") {
  const auto g = cli::parse_grid("0:1:3,-2:-2:1");
  REQUIRE(g.size() == 2);
  CHECK(g[0] == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(g[1] == std::vector<double>{-2.0});
  CHECK_THROWS_AS(cli::parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:x"), ConfigError);
  CHECK_THROWS_AS(cli::parse_grid(""), ConfigError);
}

TEST_CASE("nonstat oracles agree") {
  const auto spec = put("mix.json", R"({"type": "mixture", "measure": {"kind": "lebesgue"},
      "phi1": {"kind": "power_law", "params": [0.5]},
      "g": {"kind": "cauchy", "alpha": {"kind": "quadratic", "a": 0.5, "b": 0.2}, "nu": 0.6},
      "sigma": {"form": "scalar", "dim": 2, "a": 1, "b": 0.1}})");
  const auto pts = put("mp.csv", "s1,s2\n0,0\n1,0.5\n0.3,2\n");
  const auto q = qam_run({"nonstat", "--spec", spec, "--points", pts});
  const auto c = qam_run({"nonstat", "--spec", spec, "--points", pts, "--oracle", "closed-form"});
  REQUIRE(q.code == cli::kOk);
  REQUIRE(c.code == cli::kOk);
  const Eigen::MatrixXd mq = read_matrix(q.out), mc = read_matrix(c.out);
  CHECK(std::isinf(mq(0, 0)));
  CHECK(q.err.find("infinite") != std::string::npos);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(std::abs(mq(i, j) / mc(i, j) - 1.0) <= 1e-7);
    }
  }

  const auto bounded = put("mix_exp.json", R"({"type": "mixture", "measure": {"kind": "gamma", "shape": 2},
      "phi1": {"kind": "exp_neg"}, "g": {"kind": "exponential", "alpha": 1}, "sigma": {"form": "diagonal", "a": [1, 2], "b": [0.1, 0]}})");
  CHECK(qam_run({"nonstat", "--spec", bounded, "--points", pts, "--oracle", "closed-form"}).code == cli::kUsage);
  const auto v = qam_run({"validate", "--spec", bounded, "--n-points", "8", "--configs", "2"});
  CHECK(v.code == cli::kOk);
  CHECK(nlohmann::json::parse(v.out)["checks"][0]["passed"] == true);
}

TEST_CASE("simulate is reproducible and independent of the thread count") {
  const auto spec = put("qarf.json", R"({"type": "qarf", "exponents": [{"kind": "linear"}, {"kind": "linear"}]})");
  const auto pts = put("qp.csv", "s1,t\n0,0\n1,0\n0,1\n");
  const auto a = (dir() / "za.csv").string(), b = (dir() / "zb.csv").string(), s = (dir() / "sum.json").string();
  REQUIRE(qam_run({"--threads", "1", "simulate", "--spec", spec, "--points", pts, "--replicates", "2000", "--seed", "9",
                   "--out", a, "--summary", s, "--pairs", "0:0,0:1,0:2"})
              .code == cli::kOk);
  REQUIRE(qam_run({"--threads", "0", "simulate", "--spec", spec, "--points", pts, "--replicates", "2000", "--seed", "9",
                   "--out", b})
              .code == cli::kOk);
  CHECK(slurp(a) == slurp(b));
  const auto j = nlohmann::json::parse(slurp(s));
  REQUIRE(j["pairs"].size() == 3);
  CHECK(j["pairs"][1]["theoretical_cov"].get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  for (const auto& p : j["pairs"]) {
    CHECK(std::abs(p["empirical_cov"].get<double>() - p["theoretical_cov"].get<double>()) <= 4 * p["se"].get<double>());
  }
  CHECK(qam_run({"simulate", "--spec", spec, "--points", pts, "--pairs", "0:7"}).code == cli::kUsage);
  CHECK(qam_run({"simulate", "--spec", put("sep.json", kSeparable), "--points", pts}).code == cli::kUsage);
}
