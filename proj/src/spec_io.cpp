#include "qam/spec_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError((path.empty() ? std::string("spec") : path) + ": " + msg);
}

// Object reader that remembers which keys were asked for, so that unknown
// keys can be reported together with the valid ones.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] std::string at(const std::string& key) const { return path_ + "." + key; }

  const Json* find(const std::string& key) {
    asked_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& need(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(path_, "missing field '" + key + "'");
    return *v;
  }
  double num(const std::string& key) { return as_num(need(key), at(key)); }
  double num(const std::string& key, double def) {
    const Json* v = find(key);
    return v ? as_num(*v, at(key)) : def;
  }
  std::size_t count(const std::string& key, std::size_t def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_number_unsigned()) fail(at(key), "expected a non-negative integer");
    return v->get<std::size_t>();
  }
  std::string str(const std::string& key) {
    const Json& v = need(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }
  std::vector<double> nums(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) fail(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_num((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
  }
  std::vector<std::size_t> counts(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) fail(at(key), "expected an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) fail(at(key), "expected non-negative integers");
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (asked_.count(it.key())) continue;
      std::string valid;
      for (const auto& k : asked_) valid += (valid.empty() ? "" : ", ") + k;
      fail(path_, "unknown field '" + it.key() + "' (valid: " + valid + ")");
    }
  }

  static double as_num(const Json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> asked_;
};

template <class E>
E parse_enum(const std::string& s, std::initializer_list<E> all, const std::string& path, const char* what) {
  std::string valid;
  for (E e : all) {
    if (to_string(e) == s) return e;
    valid += (valid.empty() ? "" : ", ") + std::string(to_string(e));
  }
  fail(path, std::string("unknown ") + what + " '" + s + "' (valid: " + valid + ")");
}

// ---- kernels ----

struct KernelKind {
  const char* name;
  std::vector<std::pair<const char*, std::optional<double>>> params;
};

const std::vector<KernelKind>& kernel_kinds() {
  static const std::vector<KernelKind> kinds = {
      {"constant", {{"value", std::nullopt}}},
      {"exponential", {{"variance", 1.0}, {"scale", 1.0}}},
      {"gaussian", {{"variance", 1.0}, {"scale", 1.0}}},
      {"cauchy", {{"lambda", std::nullopt}}},
      {"generalized_cauchy", {{"delta", std::nullopt}, {"epsilon", std::nullopt}}},
      {"stretched_exponential", {{"power", std::nullopt}}},
      {"spherical", {{"range", 1.0}}},
      {"power_law", {{"rho", std::nullopt}}},
      {"product", {}},
  };
  return kinds;
}

KernelConfig parse_kernel(const Json& j, const std::string& path) {
  Obj o(j, path);
  KernelConfig k;
  k.kind = o.str("kind");
  const KernelKind* kind = nullptr;
  std::string valid;
  for (const auto& kk : kernel_kinds()) {
    if (k.kind == kk.name) kind = &kk;
    valid += (valid.empty() ? "" : ", ") + std::string(kk.name);
  }
  if (!kind) fail(o.at("kind"), "unknown kernel '" + k.kind + "' (valid: " + valid + ")");
  for (const auto& [name, def] : kind->params) k.params[name] = def ? o.num(name, *def) : o.num(name);
  if (k.kind == "product") {
    const Json& c = o.need("children");
    if (!c.is_array() || c.empty()) fail(o.at("children"), "expected a non-empty array of kernels");
    for (std::size_t i = 0; i < c.size(); ++i) {
      k.children.push_back(parse_kernel(c[i], o.at("children") + "[" + std::to_string(i) + "]"));
    }
    k.dim = 0;
    for (const auto& ch : k.children) k.dim += ch.dim;
  } else {
    k.dim = o.count("dim", 1);
  }
  o.finish();
  return k;
}

Json kernel_json(const KernelConfig& k) {
  Json j;
  j["kind"] = k.kind;
  for (const auto& [name, v] : k.params) j[name] = v;
  if (k.kind == "product") {
    j["children"] = Json::array();
    for (const auto& c : k.children) j["children"].push_back(kernel_json(c));
  } else {
    j["dim"] = k.dim;
  }
  return j;
}

// ---- generators, measures, fields ----

Generator parse_generator(const Json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = o.str("kind");
  GeneratorKind gk;
  try {
    gk = parse_generator_kind(kind);
  } catch (const ConfigError& e) {
    fail(o.at("kind"), e.what());
  }
  if (gk == GeneratorKind::custom) fail(o.at("kind"), "custom generators are library-only");
  auto params = o.nums("params");
  o.finish();
  return Generator(gk, std::move(params));
}

Json generator_json(const Generator& g) {
  if (g.kind() == GeneratorKind::custom) throw ConfigError("custom generator " + g.name() + " cannot be written");
  Json j;
  j["kind"] = std::string(to_string(g.kind()));
  j["params"] = std::vector<double>(g.params().begin(), g.params().end());
  return j;
}

MixingMeasure parse_measure(const Json& j, const std::string& path) {
  Obj o(j, path);
  const auto kind = parse_enum(o.str("kind"),
                               {MixingMeasure::Kind::lebesgue, MixingMeasure::Kind::exp_weight, MixingMeasure::Kind::gamma,
                                MixingMeasure::Kind::point_mass, MixingMeasure::Kind::discrete},
                               o.at("kind"), "measure");
  MixingMeasure m = MixingMeasure::lebesgue();
  switch (kind) {
    case MixingMeasure::Kind::lebesgue:
      break;
    case MixingMeasure::Kind::exp_weight:
      m = MixingMeasure::exp_weight();
      break;
    case MixingMeasure::Kind::gamma:
      m = MixingMeasure::gamma(o.num("shape"), o.num("rate", 1.0));
      break;
    case MixingMeasure::Kind::point_mass:
      m = MixingMeasure::point_mass(o.num("location"), o.num("mass", 1.0));
      break;
    case MixingMeasure::Kind::discrete:
      m = MixingMeasure::discrete(o.nums("locations"), o.nums("weights"));
      break;
  }
  o.finish();
  return m;
}

Json measure_json(const MixingMeasure& m) {
  Json j;
  j["kind"] = std::string(to_string(m.kind()));
  switch (m.kind()) {
    case MixingMeasure::Kind::gamma:
      j["shape"] = m.shape();
      j["rate"] = m.rate();
      break;
    case MixingMeasure::Kind::point_mass:
      j["location"] = m.atoms()[0].first;
      j["mass"] = m.atoms()[0].second;
      break;
    case MixingMeasure::Kind::discrete: {
      std::vector<double> loc, w;
      for (const auto& [x, v] : m.atoms()) {
        loc.push_back(x);
        w.push_back(v);
      }
      j["locations"] = loc;
      j["weights"] = w;
      break;
    }
    default:
      break;
  }
  return j;
}

ScalarField parse_scalar_field(const Json& j, const std::string& path) {
  if (j.is_number()) return ScalarField::constant(j.get<double>());
  Obj o(j, path);
  ScalarField f;
  f.kind = parse_enum(o.str("kind"), {ScalarField::Kind::constant, ScalarField::Kind::quadratic, ScalarField::Kind::radial},
                      o.at("kind"), "field");
  f.a = o.num("a");
  f.b = f.kind == ScalarField::Kind::constant ? 0.0 : o.num("b", 0.0);
  o.finish();
  return f;
}

Json scalar_field_json(const ScalarField& f) {
  if (f.kind == ScalarField::Kind::constant) return f.a;
  return Json{{"kind", std::string(to_string(f.kind))}, {"a", f.a}, {"b", f.b}};
}

LocalFamily parse_local(const Json& j, const std::string& path) {
  Obj o(j, path);
  LocalFamily g;
  g.kind = parse_enum(o.str("kind"), {LocalFamily::Kind::unit, LocalFamily::Kind::cauchy, LocalFamily::Kind::exponential},
                      o.at("kind"), "local family");
  if (g.kind != LocalFamily::Kind::unit) g.alpha = parse_scalar_field(o.need("alpha"), o.at("alpha"));
  if (g.kind == LocalFamily::Kind::cauchy) g.nu = parse_scalar_field(o.need("nu"), o.at("nu"));
  o.finish();
  return g;
}

Json local_json(const LocalFamily& g) {
  Json j{{"kind", std::string(to_string(g.kind))}};
  if (g.kind != LocalFamily::Kind::unit) j["alpha"] = scalar_field_json(g.alpha);
  if (g.kind == LocalFamily::Kind::cauchy) j["nu"] = scalar_field_json(g.nu);
  return j;
}

AnisotropyField parse_field(const Json& j, const std::string& path) {
  Obj o(j, path);
  const auto form = parse_enum(o.str("form"),
                               {AnisotropyField::Form::constant_matrix, AnisotropyField::Form::scalar_identity,
                                AnisotropyField::Form::diagonal},
                               o.at("form"), "anisotropy form");
  AnisotropyField f = AnisotropyField::scalar(1, 1.0, 0.0);
  switch (form) {
    case AnisotropyField::Form::constant_matrix: {
      const Json& m = o.need("matrix");
      if (!m.is_array() || m.empty()) fail(o.at("matrix"), "expected a non-empty array of rows");
      const auto p = static_cast<Eigen::Index>(m.size());
      Eigen::MatrixXd mat(p, p);
      for (Eigen::Index r = 0; r < p; ++r) {
        const Json& row = m[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != p) fail(o.at("matrix"), "matrix must be square");
        for (Eigen::Index c = 0; c < p; ++c) mat(r, c) = Obj::as_num(row[static_cast<std::size_t>(c)], o.at("matrix"));
      }
      f = AnisotropyField::constant(mat);
      break;
    }
    case AnisotropyField::Form::scalar_identity:
      f = AnisotropyField::scalar(o.count("dim", 1), o.num("a"), o.num("b", 0.0));
      break;
    case AnisotropyField::Form::diagonal:
      f = AnisotropyField::diagonal(o.nums("a"), o.nums("b"));
      break;
    case AnisotropyField::Form::callable:
      break;
  }
  o.finish();
  return f;
}

Json field_json(const AnisotropyField& f) {
  Json j{{"form", std::string(to_string(f.form()))}};
  switch (f.form()) {
    case AnisotropyField::Form::constant_matrix: {
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < f.matrix().rows(); ++r) {
        std::vector<double> row(f.matrix().row(r).begin(), f.matrix().row(r).end());
        rows.push_back(row);
      }
      j["matrix"] = rows;
      break;
    }
    case AnisotropyField::Form::scalar_identity:
      j["dim"] = f.dim();
      j["a"] = f.a()[0];
      j["b"] = f.b()[0];
      break;
    case AnisotropyField::Form::diagonal:
      j["a"] = f.a();
      j["b"] = f.b();
      break;
    case AnisotropyField::Form::callable:
      throw ConfigError("callable anisotropy fields cannot be written");
  }
  return j;
}

ExponentFunction parse_exponent(const Json& j, const std::string& path) {
  Obj o(j, path);
  const auto kind = parse_enum(o.str("kind"),
                               {ExponentFunction::Kind::linear, ExponentFunction::Kind::power, ExponentFunction::Kind::log1p,
                                ExponentFunction::Kind::shifted_power},
                               o.at("kind"), "exponent function");
  const double c = o.num("c", 1.0);
  ExponentFunction e = ExponentFunction::linear(1.0);
  switch (kind) {
    case ExponentFunction::Kind::linear:
      e = ExponentFunction::linear(c);
      break;
    case ExponentFunction::Kind::power:
      e = ExponentFunction::power(c, o.num("beta"));
      break;
    case ExponentFunction::Kind::log1p:
      e = ExponentFunction::log1p(c);
      break;
    case ExponentFunction::Kind::shifted_power:
      e = ExponentFunction::shifted_power(c, o.num("rho"));
      break;
    case ExponentFunction::Kind::callable:
      break;
  }
  o.finish();
  return e;
}

Json exponent_json(const ExponentFunction& e) {
  Json j;
  j["kind"] = std::string(to_string(e.kind()));
  j["c"] = e.c();
  switch (e.kind()) {
    case ExponentFunction::Kind::power:
      j["beta"] = e.shape();
      break;
    case ExponentFunction::Kind::shifted_power:
      j["rho"] = e.shape();
      break;
    case ExponentFunction::Kind::callable:
      throw ConfigError("callable exponent " + e.name() + " cannot be written");
    default:
      break;
  }
  return j;
}

VariogramSpec parse_variogram(const Json& j, const std::string& path) {
  Obj o(j, path);
  VariogramSpec v;
  v.kind = parse_enum(o.str("kind"),
                      {VariogramSpec::Kind::linear, VariogramSpec::Kind::power, VariogramSpec::Kind::nugget_power},
                      o.at("kind"), "variogram");
  v.scale = o.num("scale", 1.0);
  if (v.kind != VariogramSpec::Kind::linear) v.beta = o.num("beta");
  if (v.kind == VariogramSpec::Kind::nugget_power) v.nugget = o.num("nugget");
  o.finish();
  return v;
}

Json variogram_json(const VariogramSpec& v) {
  Json j{{"kind", std::string(to_string(v.kind))}, {"scale", v.scale}};
  if (v.kind != VariogramSpec::Kind::linear) j["beta"] = v.beta;
  if (v.kind == VariogramSpec::Kind::nugget_power) j["nugget"] = v.nugget;
  return j;
}

// ---- composite specs ----

CompositionConfig parse_composition(Obj& o) {
  CompositionConfig c;
  c.generator = parse_generator(o.need("generator"), o.at("generator"));
  const Json& ch = o.need("children");
  if (!ch.is_array()) fail(o.at("children"), "expected an array of kernels");
  for (std::size_t i = 0; i < ch.size(); ++i) {
    c.children.push_back(parse_kernel(ch[i], o.at("children") + "[" + std::to_string(i) + "]"));
  }
  c.weights = o.nums("weights");
  if (c.weights.empty()) c.weights.assign(c.children.size(), 1.0 / static_cast<double>(std::max<std::size_t>(1, c.children.size())));
  c.partition = o.counts("partition");
  if (const Json* r = o.find("weight_rule")) {
    if (!r->is_string()) fail(o.at("weight_rule"), "expected a string");
    c.weight_rule = parse_enum(r->get<std::string>(),
                               {WeightRule::sum_to_one, WeightRule::trivial_ones, WeightRule::unconstrained},
                               o.at("weight_rule"), "weight rule");
  }
  if (const Json* r = o.find("case")) {
    if (!r->is_string()) fail(o.at("case"), "expected a string");
    c.admissibility_case = parse_enum(r->get<std::string>(), {AdmissibilityCase::a, AdmissibilityCase::b, AdmissibilityCase::c},
                                      o.at("case"), "admissibility case");
  }
  return c;
}

Json composition_json(const CompositionConfig& c) {
  Json j;
  j["generator"] = generator_json(c.generator);
  j["children"] = Json::array();
  for (const auto& k : c.children) j["children"].push_back(kernel_json(k));
  j["weights"] = c.weights;
  if (!c.partition.empty()) j["partition"] = c.partition;
  if (c.weight_rule) j["weight_rule"] = std::string(to_string(*c.weight_rule));
  if (c.admissibility_case) j["case"] = std::string(to_string(*c.admissibility_case));
  return j;
}

std::vector<std::pair<const char*, std::optional<double>>> family_params(SpaceTimeFamily f) {
  switch (f) {
    case SpaceTimeFamily::clayton:
    case SpaceTimeFamily::gumbel:
      return {{"lambda1", std::nullopt}, {"lambda2", std::nullopt}, {"lambda3", std::nullopt}, {"sigma2", 1.0}};
    case SpaceTimeFamily::power_series:
      return {{"lambda1", std::nullopt}, {"lambda2", std::nullopt}, {"lambda3", std::nullopt}};
    case SpaceTimeFamily::frank:
      return {{"lambda", std::nullopt}};
    case SpaceTimeFamily::cauchy_margin:
      return {{"alpha", std::nullopt}, {"delta", std::nullopt}, {"epsilon", std::nullopt}, {"rho", std::nullopt}};
    default:
      return {};
  }
}

SpaceTimeConfig parse_spacetime(Obj& o) {
  SpaceTimeConfig s;
  try {
    s.family = parse_spacetime_family(o.str("family"));
  } catch (const ConfigError& e) {
    fail(o.at("family"), e.what());
  }
  s.spatial_dim = o.count("dim", 1);
  const auto names = family_params(s.family);
  if (!names.empty()) {
    Obj p(o.need("params"), o.at("params"));
    for (const auto& [name, def] : names) s.params[name] = def ? p.num(name, *def) : p.num(name);
    p.finish();
  }
  if (s.family == SpaceTimeFamily::clayton || s.family == SpaceTimeFamily::gumbel ||
      s.family == SpaceTimeFamily::power_series) {
    s.strict = o.boolean("strict", true);
  }
  if (s.family == SpaceTimeFamily::frank) {
    s.gs = parse_variogram(o.need("gs"), o.at("gs"));
    s.gt = parse_variogram(o.need("gt"), o.at("gt"));
  }
  if (s.family == SpaceTimeFamily::separable) {
    s.spatial = parse_kernel(o.need("spatial"), o.at("spatial"));
    s.temporal = parse_kernel(o.need("temporal"), o.at("temporal"));
  }
  if (s.family == SpaceTimeFamily::custom_composition) {
    Obj c(o.need("composition"), o.at("composition"));
    s.composition = parse_composition(c);
    c.finish();
  }
  return s;
}

Json spacetime_json(const SpaceTimeConfig& s) {
  Json j;
  j["family"] = std::string(to_string(s.family));
  if (s.family != SpaceTimeFamily::separable && s.family != SpaceTimeFamily::custom_composition) {
    j["dim"] = s.spatial_dim;
  }
  if (!s.params.empty()) j["params"] = s.params;
  if (s.family == SpaceTimeFamily::clayton || s.family == SpaceTimeFamily::gumbel ||
      s.family == SpaceTimeFamily::power_series) {
    j["strict"] = s.strict;
  }
  if (s.gs) j["gs"] = variogram_json(*s.gs);
  if (s.gt) j["gt"] = variogram_json(*s.gt);
  if (s.spatial) j["spatial"] = kernel_json(*s.spatial);
  if (s.temporal) j["temporal"] = kernel_json(*s.temporal);
  if (s.composition) j["composition"] = composition_json(*s.composition);
  return j;
}

MixtureConfig parse_mixture(Obj& o) {
  MixtureConfig m;
  m.mix.measure = parse_measure(o.need("measure"), o.at("measure"));
  m.mix.phi1 = parse_generator(o.need("phi1"), o.at("phi1"));
  if (const Json* g = o.find("g")) m.mix.g = parse_local(*g, o.at("g"));
  if (const Json* p = o.find("psi2")) m.mix.psi2 = parse_generator(*p, o.at("psi2"));
  m.field = parse_field(o.need("sigma"), o.at("sigma"));
  m.mix.validate();
  return m;
}

Json mixture_json(const MixtureConfig& m) {
  return Json{{"measure", measure_json(m.mix.measure)},
              {"phi1", generator_json(m.mix.phi1)},
              {"g", local_json(m.mix.g)},
              {"psi2", generator_json(m.mix.psi2)},
              {"sigma", field_json(m.field)}};
}

QarfSpec parse_qarf(Obj& o) {
  QarfSpec q;
  const Json& ex = o.need("exponents");
  if (!ex.is_array() || ex.empty()) fail(o.at("exponents"), "expected a non-empty array");
  for (std::size_t i = 0; i < ex.size(); ++i) {
    q.exponents.push_back(parse_exponent(ex[i], o.at("exponents") + "[" + std::to_string(i) + "]"));
  }
  q.partition = o.counts("partition");
  if (const Json* m = o.find("measure")) q.measure = parse_measure(*m, o.at("measure"));
  q.variance = o.num("variance", 1.0);
  q.temporal = o.boolean("temporal", true);
  if (const Json* ind = o.find("independent")) {
    if (!ind->is_array()) fail(o.at("independent"), "expected an array of measures");
    for (std::size_t i = 0; i < ind->size(); ++i) {
      q.independent.push_back(parse_measure((*ind)[i], o.at("independent") + "[" + std::to_string(i) + "]"));
    }
  }
  q.validate();
  return q;
}

Json qarf_json(const QarfSpec& q) {
  Json j;
  j["exponents"] = Json::array();
  for (const auto& e : q.exponents) j["exponents"].push_back(exponent_json(e));
  if (!q.partition.empty()) j["partition"] = q.partition;
  j["measure"] = measure_json(q.measure);
  j["variance"] = q.variance;
  j["temporal"] = q.temporal;
  if (!q.independent.empty()) {
    j["independent"] = Json::array();
    for (const auto& m : q.independent) j["independent"].push_back(measure_json(m));
  }
  return j;
}

std::string infer_type(const Json& j) {
  if (!j.is_object()) fail("spec", "expected an object");
  if (j.contains("family")) return "spacetime";
  if (j.contains("generator")) return "composition";
  if (j.contains("exponents")) return "qarf";
  if (j.contains("phi1")) return "mixture";
  if (j.contains("kind")) return "kernel";
  fail("spec", "missing field 'type' (valid: kernel, composition, spacetime, mixture, qarf)");
}

}  // namespace

Kernel KernelConfig::build() const {
  auto p = [&](const char* name) { return params.at(name); };
  if (kind == "constant") return kernels::constant(p("value"), dim);
  if (kind == "exponential") return kernels::exponential(p("variance"), p("scale"), dim);
  if (kind == "gaussian") return kernels::gaussian(p("variance"), p("scale"), dim);
  if (kind == "cauchy") return kernels::cauchy(p("lambda"), dim);
  if (kind == "generalized_cauchy") return kernels::generalized_cauchy(p("delta"), p("epsilon"), dim);
  if (kind == "stretched_exponential") return kernels::stretched_exponential(p("power"), dim);
  if (kind == "spherical") return kernels::spherical(p("range"), dim);
  if (kind == "power_law") return kernels::power_law(p("rho"), dim);
  if (kind == "product") {
    std::vector<Kernel> ks;
    for (const auto& c : children) ks.push_back(c.build());
    return kernels::product(std::move(ks));
  }
  throw ConfigError("unknown kernel '" + kind + "'");
}

CompositionSpec CompositionConfig::build() const {
  std::vector<Kernel> ks;
  for (const auto& c : children) ks.push_back(c.build());
  CompositionSpec s{generator, std::move(ks), Weights{weights}, partition, weight_rule};
  s.validate();
  return s;
}

SpaceTimeKernel SpaceTimeConfig::build() const {
  auto p = [&](const char* name) { return params.at(name); };
  switch (family) {
    case SpaceTimeFamily::clayton:
      return clayton(p("lambda1"), p("lambda2"), p("lambda3"), p("sigma2"), spatial_dim, strict);
    case SpaceTimeFamily::gumbel:
      return gumbel(p("lambda1"), p("lambda2"), p("lambda3"), p("sigma2"), spatial_dim, strict);
    case SpaceTimeFamily::power_series:
      return power_series(p("lambda1"), p("lambda2"), p("lambda3"), spatial_dim, strict);
    case SpaceTimeFamily::frank:
      return frank(p("lambda"), *gs, *gt, spatial_dim);
    case SpaceTimeFamily::cauchy_margin:
      return cauchy_margins(p("alpha"), p("delta"), p("epsilon"), p("rho"), spatial_dim);
    case SpaceTimeFamily::separable:
      return separable(spatial->build(), temporal->build());
    case SpaceTimeFamily::custom_composition:
      return from_composition(composition->build());
  }
  throw ConfigError("unknown space-time family");
}

std::string_view Spec::type() const {
  static constexpr std::string_view names[] = {"kernel", "composition", "spacetime", "mixture", "qarf"};
  return names[body.index()];
}

Spec parse_spec(const Json& j) {
  try {
    Obj o(j, "spec");
    const std::string type = j.contains("type") ? o.str("type") : infer_type(j);
    Spec s;
    if (type == "kernel") {
      Json copy = j;
      if (copy.contains("type")) copy.erase("type");
      s.body = parse_kernel(copy, "spec");
      (void)std::get<KernelConfig>(s.body).build();
      return s;
    }
    if (type == "composition") {
      auto c = parse_composition(o);
      (void)compose(c.build());
      s.body = std::move(c);
    } else if (type == "spacetime") {
      auto c = parse_spacetime(o);
      if (c.family == SpaceTimeFamily::separable || c.family == SpaceTimeFamily::custom_composition) {
        c.spatial_dim = c.build().spatial_dim();
      }
      (void)c.build();
      s.body = std::move(c);
    } else if (type == "mixture") {
      s.body = parse_mixture(o);
    } else if (type == "qarf") {
      s.body = parse_qarf(o);
    } else {
      fail("spec.type", "unknown spec type '" + type + "' (valid: kernel, composition, spacetime, mixture, qarf)");
    }
    o.finish();
    return s;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid spec: ") + e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid spec: ") + e.what());
  }
}

Spec parse_spec_text(const std::string& text, const std::string& origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..."
    std::string what = e.what();
    const auto pos = what.find("] ");
    throw ConfigError(origin + ": malformed JSON: " + (pos == std::string::npos ? what : what.substr(pos + 2)));
  }
  return parse_spec(j);
}

Spec load_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open spec " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_spec_text(ss.str(), path.string());
}

Json to_json(const Spec& spec) {
  Json j = std::visit(
      [](const auto& b) -> Json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, KernelConfig>) return kernel_json(b);
        if constexpr (std::is_same_v<T, CompositionConfig>) return composition_json(b);
        if constexpr (std::is_same_v<T, SpaceTimeConfig>) return spacetime_json(b);
        if constexpr (std::is_same_v<T, MixtureConfig>) return mixture_json(b);
        if constexpr (std::is_same_v<T, QarfSpec>) return qarf_json(b);
      },
      spec.body);
  j["type"] = std::string(spec.type());
  return j;
}

void write_spec(const Spec& spec, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os << to_json(spec).dump(2) << '\n';
  if (!os) throw ConfigError("write failed: " + path.string());
}

Kernel stationary_kernel(const Spec& spec) {
  return std::visit(
      [](const auto& b) -> Kernel {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, KernelConfig>) return b.build();
        if constexpr (std::is_same_v<T, CompositionConfig>) return compose(b.build());
        if constexpr (std::is_same_v<T, SpaceTimeConfig>) return b.build().as_kernel();
        if constexpr (std::is_same_v<T, QarfSpec>) return qarf_kernel(b);
        if constexpr (std::is_same_v<T, MixtureConfig>) {
          throw ConfigError("mixture specs are nonstationary; use the nonstat subcommand");
        }
      },
      spec.body);
}

}  // namespace qam
