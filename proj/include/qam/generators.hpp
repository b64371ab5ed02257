#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qam {

enum class GeneratorKind {
  exp_neg,           // e^{-t}, geometric average
  reciprocal,        // 1/t, harmonic average
  truncated_linear,  // M(1 - t/M)_+, arithmetic average
  neg_log,           // -ln t
  clayton,           // (1 + x)^{-1/lambda1}
  gumbel,            // exp(-x^{1/lambda1})
  power_series,      // 1 - (1 - e^{-x})^{1/lambda1}
  frank,             // -(1/lambda) ln(1 - (1 - e^{-lambda}) e^{-x})
  power_law,         // x^{-alpha}
  custom,            // user-supplied pair, library use only
};

enum class WeightRule { sum_to_one, trivial_ones, unconstrained };

enum class Direction { forward, inverse };

/// Interval of the extended real line; infinite endpoints are allowed and
/// count as members when the corresponding side is closed.
struct Interval {
  double lo;
  double hi;
  bool lo_closed = true;
  bool hi_closed = true;

  [[nodiscard]] bool contains(double x) const noexcept;
};

/// A generating function phi together with its proper inverse.
///
/// Immutable after construction. `phi` / `phi_inv` are the unchecked hot path
/// used by compositions; `evaluate` validates the argument against the
/// relevant domain first. Extended values follow the usual conventions
/// (ln 0 = -inf, exp(-inf) = 0, 1/0 = inf, 1/inf = 0).
class Generator {
 public:
  /// Built-in kinds. Throws ParameterError naming the violated bound.
  Generator(GeneratorKind kind, std::vector<double> params = {});

  /// Library-only synthetic generator.
  static Generator custom(std::string name, std::function<double(double)> phi,
                          std::function<double(double)> phi_inv, Interval phi_domain,
                          Interval inv_domain, bool completely_monotone,
                          WeightRule rule = WeightRule::unconstrained);

  [[nodiscard]] GeneratorKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
  [[nodiscard]] const Interval& phi_domain() const noexcept { return phi_domain_; }
  [[nodiscard]] const Interval& inv_domain() const noexcept { return inv_domain_; }
  [[nodiscard]] WeightRule weight_rule() const noexcept { return rule_; }
  [[nodiscard]] bool completely_monotone() const noexcept { return cm_; }
  [[nodiscard]] std::string name() const;

  [[nodiscard]] double phi(double x) const;
  [[nodiscard]] double phi_inv(double y) const;

  /// Checked evaluation; throws DomainError outside the domain.
  [[nodiscard]] double evaluate(Direction direction, double x) const;

 private:
  struct CustomFns {
    std::string name;
    std::function<double(double)> phi;
    std::function<double(double)> phi_inv;
  };

  Generator() = default;

  GeneratorKind kind_ = GeneratorKind::exp_neg;
  std::vector<double> params_;
  Interval phi_domain_{0.0, 0.0};
  Interval inv_domain_{0.0, 0.0};
  WeightRule rule_ = WeightRule::unconstrained;
  bool cm_ = false;
  double p0_ = 0.0;  // first parameter, cached
  double aux_ = 0.0; // kind-specific precomputed constant
  std::shared_ptr<const CustomFns> custom_;
};

inline Generator make_generator(GeneratorKind kind, std::vector<double> params = {}) {
  return Generator(kind, std::move(params));
}

inline double evaluate(const Generator& g, Direction direction, double x) {
  return g.evaluate(direction, x);
}

struct CatalogEntry {
  GeneratorKind kind;
  std::string name;
  std::vector<std::string> param_names;
  WeightRule weight_rule;
  bool completely_monotone;
};

/// All built-in kinds, in declaration order.
[[nodiscard]] std::vector<CatalogEntry> catalog();

[[nodiscard]] std::string_view to_string(GeneratorKind kind);
[[nodiscard]] std::string_view to_string(WeightRule rule);
/// Throws ConfigError listing the valid names.
[[nodiscard]] GeneratorKind parse_generator_kind(std::string_view name);

/// The Frank generator without the leading minus sign,
/// (1/lambda) ln(1 - (1 - e^{-lambda}) e^{-x}). It is the negative of the
/// proper inverse of the Frank phi^{-1}; kept to document that anomaly.
[[nodiscard]] double frank_phi_as_printed(double lambda, double x);

}  // namespace qam
