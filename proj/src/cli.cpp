#include "qam/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qam/csv.hpp"
#include "qam/error.hpp"
#include "qam/gram.hpp"
#include "qam/parallel.hpp"
#include "qam/permissibility.hpp"
#include "qam/spec_io.hpp"
#include "qam/version.hpp"

namespace qam::cli {
namespace {

using Json = nlohmann::json;

struct Options {
  std::string spec, points, grid, out, summary, pairs, oracle = "quadrature", admissibility_case;
  std::uint64_t seed = 0;
  std::size_t replicates = 1000, configs = 5, n_points = 30;
  int max_order = 4, ms_order = 2, threads = -1;
  double rel_tol = 1e-8;
};

// Writes to `path`, or to `out` when path is empty or "-".
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    out.flush();
    return;
  }
  std::ostringstream buf;
  write(buf);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os << buf.str();
  if (!os) throw ConfigError("write failed: " + path);
}

std::size_t spec_dim(const Spec& spec) {
  if (const auto* m = std::get_if<MixtureConfig>(&spec.body)) return m->field.dim();
  return stationary_kernel(spec).dim();
}

std::vector<std::string> default_header(const Spec& spec, std::size_t dim) {
  std::vector<std::string> h;
  const bool spacetime = std::holds_alternative<SpaceTimeConfig>(spec.body) ||
                         (std::holds_alternative<QarfSpec>(spec.body) && std::get<QarfSpec>(spec.body).temporal);
  const std::size_t spatial = spacetime ? dim - 1 : dim;
  const char* prefix = std::holds_alternative<MixtureConfig>(spec.body) || std::holds_alternative<QarfSpec>(spec.body) ? "s" : "h";
  if (std::holds_alternative<KernelConfig>(spec.body) || std::holds_alternative<CompositionConfig>(spec.body)) prefix = "x";
  for (std::size_t k = 0; k < spatial; ++k) h.push_back(prefix + std::to_string(k + 1));
  if (spacetime) h.push_back(std::holds_alternative<QarfSpec>(spec.body) ? "t" : "u");
  return h;
}

PointTable load_points(const Options& o, const Spec& spec) {
  PointTable t;
  if (!o.grid.empty()) {
    const auto axes = parse_grid(o.grid);
    std::vector<double> coords;
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      for (std::size_t k = 0; k < axes.size(); ++k) coords.push_back(axes[k][idx[k]]);
      for (std::size_t k = axes.size(); k-- > 0;) {
        if (++idx[k] < axes[k].size()) break;
        idx[k] = 0;
      }
    }
    t.points = PointSet(axes.size(), std::move(coords));
  } else {
    t = read_points(std::filesystem::path(o.points));
  }
  const std::size_t dim = spec_dim(spec);
  if (t.points.dim() != dim) {
    throw ConfigError("points have " + std::to_string(t.points.dim()) + " columns but the " + std::string(spec.type()) +
                      " spec has dimension " + std::to_string(dim));
  }
  if (t.header.empty()) t.header = default_header(spec, dim);
  return t;
}

Json witness_json(const Witness& w) {
  Json j;
  j["location"] = w.location;
  j["value"] = std::isfinite(w.value) ? Json(w.value) : Json(std::to_string(w.value));
  if (w.order >= 0) j["order"] = w.order;
  if (!w.weights.empty()) j["weights"] = w.weights;
  if (w.child >= 0) j["child"] = w.child;
  return j;
}

Json finite_or_string(double v) { return std::isfinite(v) ? Json(v) : Json(std::to_string(v)); }

Json check_json(const CheckReport& r) {
  Json j{{"check", r.check},
         {"passed", r.passed},
         {"worst_margin", finite_or_string(r.worst_margin)},
         {"tolerance", r.tolerance},
         {"max_order_checked", r.max_order_checked}};
  j["witness"] = r.witness ? witness_json(*r.witness) : Json(nullptr);
  return j;
}

// Margin in units of kPsdRtol * max eigenvalue, matching CheckReport.
Json psd_check(const std::function<GramReport(const PointSet&)>& gram, std::size_t dim, const Options& o) {
  bool passed = true;
  double worst = std::numeric_limits<double>::infinity();
  Json witness = nullptr;
  for (std::size_t c = 0; c < o.configs; ++c) {
    const PointSet pts = PointSet::unit_cube(o.n_points, dim, o.seed + c);
    const GramReport g = gram(pts);
    const double scale = kPsdRtol * std::max(std::abs(g.max_eigenvalue), std::numeric_limits<double>::min());
    const double margin = g.min_eigenvalue / scale;
    if (margin < worst) {
      worst = margin;
      witness = {{"configuration_seed", o.seed + c},
                 {"points", pts.size()},
                 {"min_eigenvalue", g.min_eigenvalue},
                 {"max_eigenvalue", g.max_eigenvalue}};
    }
    passed = passed && g.psd;
  }
  return {{"check", "gram_psd"}, {"passed", passed}, {"worst_margin", finite_or_string(worst)}, {"tolerance", 1.0},
          {"configurations", o.configs}, {"witness", witness}};
}

std::optional<AdmissibilityCase> parse_case(const std::string& s) {
  if (s.empty()) return std::nullopt;
  for (auto c : {AdmissibilityCase::a, AdmissibilityCase::b, AdmissibilityCase::c}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown admissibility case '" + s + "' (valid: a, b, c)");
}

Json ms_json(const MsDiffReport& r) {
  Json j{{"coordinate", r.coordinate}, {"differentiable_order", r.differentiable_order}, {"probe_finite", r.probe_finite}};
  j["moments"] = Json::array();
  for (const auto& m : r.moments) {
    j["moments"].push_back({{"k", m.k}, {"finite", m.finite}, {"value", m.value}, {"last_ratio", m.last_ratio}});
  }
  return j;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const Spec spec = load_spec(o.spec);
  std::vector<Json> checks;
  Json diagnostics = Json::object();
  AdmissibilityOptions adm;
  adm.max_order = o.max_order;
  adm.cnd.seed = o.seed;
  const auto requested = parse_case(o.admissibility_case);

  if (const auto* c = std::get_if<CompositionConfig>(&spec.body)) {
    const auto which = requested.value_or(c->admissibility_case.value_or(AdmissibilityCase::a));
    checks.push_back(check_json(admissibility(c->build(), which, adm)));
  } else if (const auto* s = std::get_if<SpaceTimeConfig>(&spec.body)) {
    const SpaceTimeKernel k = s->build();
    if (k.composition() && k.composition()->generator.completely_monotone()) {
      const auto def = s->family == SpaceTimeFamily::cauchy_margin ? AdmissibilityCase::a : AdmissibilityCase::b;
      checks.push_back(check_json(admissibility(*k.composition(), requested.value_or(def), adm)));
    } else if (requested) {
      throw ConfigError("space-time family " + std::string(to_string(s->family)) + " has no composition to check");
    }
  } else if (const auto* q = std::get_if<QarfSpec>(&spec.body)) {
    diagnostics["ms_differentiability"] = Json::array();
    for (std::size_t b = 0; b < q->blocks(); ++b) {
      if (q->block_dim(b) != 1) continue;
      diagnostics["ms_differentiability"].push_back(ms_json(ms_diff_order(*q, b, o.ms_order)));
    }
  } else if (const auto* m = std::get_if<MixtureConfig>(&spec.body)) {
    diagnostics["local_integrability"] = Json::array();
    const PointSet probes = PointSet::unit_cube(4, m->field.dim(), o.seed);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const auto p = local_integrability(m->mix, probes[i]);
      diagnostics["local_integrability"].push_back(
          {{"location", std::vector<double>(probes[i].begin(), probes[i].end())}, {"integrable", p.integrable}, {"value", p.value}});
    }
  }

  if (const auto* m = std::get_if<MixtureConfig>(&spec.body)) {
    if (std::isinf(m->mix.phi1.phi(0.0))) {
      checks.push_back({{"check", "gram_psd"},
                        {"skipped", true},
                        {"passed", nullptr},
                        {"reason", "phi1(0) is infinite: the variance diverges at coincident locations"}});
    } else {
      QuadOptions qo;
      qo.rel_tol = o.rel_tol;
      const PairFn pair = nonstationary_pair(m->mix, m->field, qo);
      checks.push_back(psd_check([&](const PointSet& p) { return gram_psd(pair, p); }, m->field.dim(), o));
    }
  } else {
    const Kernel k = stationary_kernel(spec);
    checks.push_back(psd_check([&](const PointSet& p) { return gram_psd(k, p); }, k.dim(), o));
  }

  Json report;
  bool passed = true;
  report["spec"] = o.spec;
  report["spec_type"] = std::string(spec.type());
  report["seed"] = o.seed;
  report["checks"] = Json::array();
  for (const auto& c : checks) {
    report["checks"].push_back(c);
    if (c["passed"].is_null() || c["passed"].get<bool>()) continue;
    passed = false;
    err << "qam: check " << c["check"].get<std::string>() << " failed (worst margin " << c["worst_margin"].dump() << ")\n";
  }
  report["passed"] = passed;
  if (!diagnostics.empty()) report["diagnostics"] = diagnostics;
  stamp_report(report);
  write_report(report, o.out, out);
  return passed ? kOk : kCheckFailed;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Spec spec = load_spec(o.spec);
  if (std::holds_alternative<MixtureConfig>(spec.body)) {
    throw ConfigError("eval takes lags of a stationary spec; use nonstat for mixture specs");
  }
  const Kernel k = stationary_kernel(spec);
  PointTable t = load_points(o, spec);
  std::vector<double> values(t.points.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = k.eval(t.points[i]);
  t.header.push_back("value");
  emit(o.out, out, [&](std::ostream& os) { write_points(os, t.header, t.points, {values}); });
  return kOk;
}

Eigen::MatrixXd spec_gram(const Spec& spec, const PointSet& pts, double rel_tol) {
  if (const auto* m = std::get_if<MixtureConfig>(&spec.body)) {
    QuadOptions qo;
    qo.rel_tol = rel_tol;
    return gram_matrix(nonstationary_pair(m->mix, m->field, qo), pts);
  }
  return gram_matrix(stationary_kernel(spec), pts);
}

int cmd_gram(const Options& o, std::ostream& out) {
  const Spec spec = load_spec(o.spec);
  const PointTable t = load_points(o, spec);
  const Eigen::MatrixXd g = spec_gram(spec, t.points, o.rel_tol);
  emit(o.out, out, [&](std::ostream& os) { write_matrix(os, g); });
  return kOk;
}

PairFn closed_form(const MixtureConfig& m) {
  const auto& mix = m.mix;
  const auto field = m.field;
  if (mix.psi2.kind() == GeneratorKind::exp_neg && mix.phi1.kind() == GeneratorKind::power_law) {
    const double a = mix.phi1.params()[0];
    if (mix.measure.kind() == MixingMeasure::Kind::lebesgue && mix.g.kind == LocalFamily::Kind::cauchy) {
      const auto g = mix.g;
      return [=](std::span<const double> s1, std::span<const double> s2) {
        return closed_form_cauchy_2f1(1.0 - a, g.alpha, g.nu, field, s1, s2);
      };
    }
    if (mix.measure.kind() == MixingMeasure::Kind::exp_weight && mix.g.kind == LocalFamily::Kind::exponential) {
      const auto g = mix.g;
      return [=](std::span<const double> s1, std::span<const double> s2) {
        return closed_form_besselk(1.0 - a, g.alpha, field, s1, s2);
      };
    }
  }
  throw ConfigError(
      "no closed form for this mixture (available: lebesgue + power_law + cauchy g, "
      "exp_weight + power_law + exponential g, both with psi2 = exp_neg)");
}

int cmd_nonstat(const Options& o, std::ostream& out, std::ostream& err) {
  const Spec spec = load_spec(o.spec);
  const auto* m = std::get_if<MixtureConfig>(&spec.body);
  if (!m) throw ConfigError("nonstat needs a mixture spec, got " + std::string(spec.type()));
  PairFn pair;
  if (o.oracle == "closed-form") {
    pair = closed_form(*m);
  } else {
    QuadOptions qo;
    qo.rel_tol = o.rel_tol;
    pair = nonstationary_pair(m->mix, m->field, qo);
  }
  const PointTable t = load_points(o, spec);
  const auto& pts = t.points;
  auto coincident = [&](std::size_t i, std::size_t j) { return std::ranges::equal(pts[i], pts[j]); };
  // Coincident entries diverge when phi1(0) is infinite; they are filled in afterwards.
  const bool diverges = std::isinf(m->mix.phi1.phi(0.0));
  const PairFn guarded = [&](std::span<const double> a, std::span<const double> b) {
    return diverges && std::ranges::equal(a, b) ? 0.0 : pair(a, b);
  };
  Eigen::MatrixXd g = gram_matrix(guarded, pts);
  std::size_t infinite = 0;
  for (std::size_t i = 0; diverges && i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (!coincident(i, j)) continue;
      g(i, j) = std::numeric_limits<double>::infinity();
      ++infinite;
    }
  }
  if (infinite) err << "qam: " << infinite << " coincident entries are infinite (phi1(0) = inf)\n";
  emit(o.out, out, [&](std::ostream& os) { write_matrix(os, g); });
  return kOk;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (text.empty()) {
    for (std::size_t j = 0; j < n; ++j) out.emplace_back(0, j);
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t i = 0, j = 0;
    char colon = 0;
    std::istringstream ps(item);
    if (!(ps >> i >> colon >> j) || colon != ':' || !(ps >> std::ws).eof()) {
      throw ConfigError("--pairs: expected i:j[,i:j...], got '" + item + "'");
    }
    if (i >= n || j >= n) throw ConfigError("--pairs: index out of range in '" + item + "'");
    out.emplace_back(i, j);
  }
  return out;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Spec spec = load_spec(o.spec);
  const auto* q = std::get_if<QarfSpec>(&spec.body);
  if (!q) throw ConfigError("simulate needs a qarf spec, got " + std::string(spec.type()));
  if (o.replicates == 0) throw ConfigError("--replicates must be >= 1");
  const PointTable t = load_points(o, spec);
  const auto pairs = parse_pairs(o.pairs, t.points.size());
  const Eigen::MatrixXd z = simulate(*q, t.points, o.replicates, o.seed);
  emit(o.out, out, [&](std::ostream& os) { write_matrix(os, z); });
  if (!o.summary.empty()) {
    Json s;
    s["spec"] = o.spec;
    s["replicates"] = o.replicates;
    s["seed"] = o.seed;
    s["pairs"] = Json::array();
    std::vector<double> lag(t.points.dim());
    for (const auto& [i, j] : pairs) {
      for (std::size_t k = 0; k < lag.size(); ++k) lag[k] = t.points[i][k] - t.points[j][k];
      const auto e = empirical_covariance(z, i, j);
      s["pairs"].push_back(
          {{"i", i}, {"j", j}, {"empirical_cov", e.value}, {"theoretical_cov", theoretical_cov(*q, lag)}, {"se", e.se}});
    }
    stamp_report(s);
    write_report(s, o.summary, out);
  }
  return kOk;
}

// The first bare word, when it names no subcommand.
std::optional<std::string> unknown_subcommand(const CLI::App& app, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("-", 0) == 0) continue;
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == args[i]) return std::nullopt;
    }
    return "unknown subcommand '" + args[i] + "'";
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::vector<double>> parse_grid(const std::string& text) {
  std::vector<std::vector<double>> axes;
  std::istringstream is(text);
  std::string axis;
  while (std::getline(is, axis, ',')) {
    double lo = 0, hi = 0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream as(axis);
    if (!(as >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(as >> std::ws).eof()) {
      throw ConfigError("--grid: expected lo:hi:n per axis, got '" + axis + "'");
    }
    if (n < 1) throw ConfigError("--grid: count must be >= 1 in '" + axis + "'");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("--grid: bounds must be finite in '" + axis + "'");
    axes.push_back(n == 1 ? std::vector<double>{lo} : linear_grid(lo, hi, static_cast<std::size_t>(n)));
  }
  if (axes.empty()) throw ConfigError("--grid: no axes");
  return axes;
}

void stamp_report(Json& report) {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  report["tool"] = "qam";
  report["version"] = std::string(kVersion);
  report["timestamp"] = buf;
}

void write_report(const Json& report, const std::string& path, std::ostream& out) {
  emit(path, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quasi-arithmetic covariance compositions", "qam"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "Thread cap for parallel kernels (0 = auto; default QAM_THREADS)");

  auto spec_opt = [&](CLI::App* c) { c->add_option("--spec", o.spec, "Spec JSON")->required(); };
  auto points_opt = [&](CLI::App* c, bool grid) {
    auto* p = c->add_option("--points", o.points, "Points CSV (header optional)");
    if (grid) {
      auto* g = c->add_option("--grid", o.grid, "lo:hi:n per axis, comma separated");
      p->excludes(g);
      g->excludes(p);
      c->require_option(1, 0);
    } else {
      p->required();
    }
  };
  auto out_opt = [&](CLI::App* c, const char* what) { c->add_option("--out", o.out, what); };

  auto* eval = app.add_subcommand("eval", "Evaluate a stationary spec at lags; writes a point table");
  spec_opt(eval);
  points_opt(eval, true);
  out_opt(eval, "Output CSV (default stdout)");

  auto* gram = app.add_subcommand("gram", "Gram matrix at points; writes an n x n CSV");
  spec_opt(gram);
  points_opt(gram, true);
  out_opt(gram, "Output CSV (default stdout)");
  gram->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance for mixture specs")->default_val(1e-8);

  auto* validate = app.add_subcommand("validate", "Permissibility checks; writes a JSON report");
  spec_opt(validate);
  out_opt(validate, "Report JSON (default stdout)");
  validate->add_option("--case", o.admissibility_case, "Admissibility case a, b or c");
  validate->add_option("--seed", o.seed, "Seed for random configurations")->default_val(0);
  validate->add_option("--max-order", o.max_order, "Highest derivative order checked")->default_val(4)
      ->check(CLI::Range(1, kMaxDerivativeOrder));
  validate->add_option("--configs", o.configs, "Random point configurations for the Gram check")->default_val(5)
      ->check(CLI::PositiveNumber);
  validate->add_option("--n-points", o.n_points, "Points per configuration")->default_val(30)->check(CLI::PositiveNumber);
  validate->add_option("--ms-order", o.ms_order, "Highest spectral moment for QARF specs")->default_val(2)
      ->check(CLI::Range(0, 4));
  validate->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance for mixture specs")->default_val(1e-8);

  auto* sim = app.add_subcommand("simulate", "Simulate a QARF; writes replicates x points CSV");
  spec_opt(sim);
  points_opt(sim, true);
  out_opt(sim, "Samples CSV (default stdout)");
  sim->add_option("--replicates", o.replicates, "Replicates")->default_val(1000);
  sim->add_option("--seed", o.seed, "Seed")->default_val(0);
  sim->add_option("--summary", o.summary, "Covariance summary JSON");
  sim->add_option("--pairs", o.pairs, "Point pairs i:j for the summary (default 0:j for all j)");

  auto* ns = app.add_subcommand("nonstat", "Nonstationary mixture covariance matrix");
  spec_opt(ns);
  points_opt(ns, true);
  out_opt(ns, "Output CSV (default stdout)");
  ns->add_option("--oracle", o.oracle, "quadrature or closed-form")
      ->check(CLI::IsMember({"quadrature", "closed-form"}))
      ->default_val("quadrature");
  ns->add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance")->default_val(1e-8);

  std::vector<std::string> argv_store{"qam"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "qam: " << unknown_subcommand(app, args).value_or(e.what()) << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (o.threads >= 0) set_thread_limit(o.threads);
    if (eval->parsed()) return cmd_eval(o, out);
    if (gram->parsed()) return cmd_gram(o, out);
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (ns->parsed()) return cmd_nonstat(o, out, err);
  } catch (const std::exception& e) {
    err << "qam: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace qam::cli
