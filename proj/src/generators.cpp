#include "qam/generators.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindInfo {
  GeneratorKind kind;
  const char* name;
  std::vector<std::string> param_names;
  WeightRule rule;
  bool cm;
};

// ln(1 - e^{-x}) for x >= 0, accurate at both ends
double log1mexp(double x) {
  return x < 0.6931471805599453 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

const std::array<KindInfo, 9>& kind_table() {
  static const std::array<KindInfo, 9> table{{
      {GeneratorKind::exp_neg, "exp_neg", {}, WeightRule::sum_to_one, true},
      {GeneratorKind::reciprocal, "reciprocal", {}, WeightRule::sum_to_one, true},
      {GeneratorKind::truncated_linear, "truncated_linear", {"M"}, WeightRule::sum_to_one, false},
      {GeneratorKind::neg_log, "neg_log", {}, WeightRule::unconstrained, false},
      {GeneratorKind::clayton, "clayton", {"lambda1"}, WeightRule::unconstrained, true},
      {GeneratorKind::gumbel, "gumbel", {"lambda1"}, WeightRule::unconstrained, true},
      {GeneratorKind::power_series, "power_series", {"lambda1"}, WeightRule::unconstrained, true},
      {GeneratorKind::frank, "frank", {"lambda"}, WeightRule::unconstrained, true},
      {GeneratorKind::power_law, "power_law", {"alpha"}, WeightRule::unconstrained, true},
  }};
  return table;
}

const KindInfo& info(GeneratorKind kind) {
  for (const auto& k : kind_table()) {
    if (k.kind == kind) return k;
  }
  throw ParameterError("generator: no catalog entry for custom kind");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

std::string format_interval(const Interval& iv) {
  std::ostringstream os;
  os << (iv.lo_closed ? '[' : '(') << iv.lo << ", " << iv.hi << (iv.hi_closed ? ']' : ')');
  return os.str();
}

}  // namespace

bool Interval::contains(double x) const noexcept {
  if (std::isnan(x)) return false;
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

Generator::Generator(GeneratorKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  if (kind == GeneratorKind::custom) {
    throw ParameterError("generator: use Generator::custom for synthetic generators");
  }
  const KindInfo& k = info(kind);
  if (params_.size() != k.param_names.size()) {
    std::ostringstream os;
    os << "generator " << k.name << ": expected " << k.param_names.size()
       << " parameter(s), got " << params_.size();
    throw ParameterError(os.str());
  }
  for (double p : params_) require(std::isfinite(p), std::string("generator ") + k.name + ": non-finite parameter");
  rule_ = k.rule;
  cm_ = k.cm;
  p0_ = params_.empty() ? 0.0 : params_[0];

  switch (kind) {
    case GeneratorKind::exp_neg:
      phi_domain_ = {-kInf, kInf, false, true};
      inv_domain_ = {0.0, kInf, true, false};
      break;
    case GeneratorKind::reciprocal:
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, kInf};
      break;
    case GeneratorKind::truncated_linear:
      require(p0_ > 0.0, "generator truncated_linear: M > 0 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, p0_};
      break;
    case GeneratorKind::neg_log:
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {-kInf, kInf};
      break;
    case GeneratorKind::clayton:
      require(p0_ > 0.0, "generator clayton: lambda1 > 0 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, 1.0};
      break;
    case GeneratorKind::gumbel:
      require(p0_ >= 1.0, "generator gumbel: lambda1 >= 1 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, 1.0};
      break;
    case GeneratorKind::power_series:
      require(p0_ >= 1.0, "generator power_series: lambda1 >= 1 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, 1.0};
      break;
    case GeneratorKind::frank:
      require(p0_ > 0.0, "generator frank: lambda > 0 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, 1.0};
      aux_ = std::expm1(-p0_);  // e^{-lambda} - 1
      break;
    case GeneratorKind::power_law:
      require(p0_ > 0.0, "generator power_law: alpha > 0 required");
      phi_domain_ = {0.0, kInf};
      inv_domain_ = {0.0, kInf, false, true};
      break;
    case GeneratorKind::custom:
      break;
  }
}

Generator Generator::custom(std::string name, std::function<double(double)> phi,
                            std::function<double(double)> phi_inv, Interval phi_domain,
                            Interval inv_domain, bool completely_monotone, WeightRule rule) {
  Generator g;
  g.kind_ = GeneratorKind::custom;
  g.phi_domain_ = phi_domain;
  g.inv_domain_ = inv_domain;
  g.cm_ = completely_monotone;
  g.rule_ = rule;
  g.custom_ = std::make_shared<const CustomFns>(
      CustomFns{std::move(name), std::move(phi), std::move(phi_inv)});
  return g;
}

std::string Generator::name() const {
  if (kind_ == GeneratorKind::custom) return custom_->name;
  std::ostringstream os;
  os << to_string(kind_);
  if (!params_.empty()) {
    os << '(';
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? ", " : "") << params_[i];
    os << ')';
  }
  return os.str();
}

double Generator::phi(double x) const {
  switch (kind_) {
    case GeneratorKind::exp_neg:
      return std::exp(-x);
    case GeneratorKind::reciprocal:
      return x == 0.0 ? kInf : 1.0 / x;
    case GeneratorKind::truncated_linear:
      return x >= p0_ ? 0.0 : p0_ - x;
    case GeneratorKind::neg_log:
      return -std::log(x);
    case GeneratorKind::clayton:
      return std::exp(-std::log1p(x) / p0_);
    case GeneratorKind::gumbel:
      return std::exp(-std::pow(x, 1.0 / p0_));
    case GeneratorKind::power_series:
      // 1 - (1 - e^{-x})^{1/lambda1}
      return -std::expm1(log1mexp(x) / p0_);
    case GeneratorKind::frank:
      // -(1/lambda) ln(1 - (1 - e^{-lambda}) e^{-x}); aux_ = e^{-lambda} - 1
      return -std::log1p(aux_ * std::exp(-x)) / p0_;
    case GeneratorKind::power_law:
      return x == 0.0 ? kInf : std::pow(x, -p0_);
    case GeneratorKind::custom:
      return custom_->phi(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Generator::phi_inv(double y) const {
  switch (kind_) {
    case GeneratorKind::exp_neg:
      return -std::log(y);
    case GeneratorKind::reciprocal:
      return y == 0.0 ? kInf : 1.0 / y;
    case GeneratorKind::truncated_linear:
      return y >= p0_ ? 0.0 : p0_ - y;
    case GeneratorKind::neg_log:
      return std::exp(-y);
    case GeneratorKind::clayton:
      return std::expm1(-p0_ * std::log(y));
    case GeneratorKind::gumbel:
      return std::pow(-std::log(y), p0_);
    case GeneratorKind::power_series:
      // -ln(1 - (1 - y)^{lambda1})
      return -std::log(-std::expm1(p0_ * std::log1p(-y)));
    case GeneratorKind::frank:
      // -ln((1 - e^{-lambda y}) / (1 - e^{-lambda}))
      return -std::log(std::expm1(-p0_ * y) / aux_);
    case GeneratorKind::power_law:
      return std::pow(y, -1.0 / p0_);
    case GeneratorKind::custom:
      return custom_->phi_inv(y);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Generator::evaluate(Direction direction, double x) const {
  const bool fwd = direction == Direction::forward;
  const Interval& dom = fwd ? phi_domain_ : inv_domain_;
  if (!dom.contains(x)) {
    std::ostringstream os;
    os << "generator " << name() << ": " << (fwd ? "phi" : "phi^-1") << " argument " << x
       << " outside domain " << format_interval(dom);
    throw DomainError(os.str());
  }
  return fwd ? phi(x) : phi_inv(x);
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  out.reserve(kind_table().size());
  for (const auto& k : kind_table()) {
    out.push_back({k.kind, k.name, k.param_names, k.rule, k.cm});
  }
  return out;
}

std::string_view to_string(GeneratorKind kind) {
  if (kind == GeneratorKind::custom) return "custom";
  return info(kind).name;
}

std::string_view to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::sum_to_one:
      return "sum_to_one";
    case WeightRule::trivial_ones:
      return "trivial_ones";
    case WeightRule::unconstrained:
      return "unconstrained";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  for (const auto& k : kind_table()) {
    if (name == k.name) return k.kind;
  }
  std::string valid;
  for (const auto& k : kind_table()) {
    if (!valid.empty()) valid += ", ";
    valid += k.name;
  }
  throw ConfigError("unknown generator kind '" + std::string(name) + "' (valid: " + valid + ")");
}

double frank_phi_as_printed(double lambda, double x) {
  return std::log1p(std::expm1(-lambda) * std::exp(-x)) / lambda;
}

}  // namespace qam
