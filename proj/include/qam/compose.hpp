#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qam/generators.hpp"
#include "qam/kernel.hpp"
#include "qam/points.hpp"

namespace qam {

/// Comparison slack used by the ordering checks.
inline constexpr double kOrderingSlack = 1e-10;

struct Weights {
  std::vector<double> values;

  static Weights equal(std::size_t n) { return {std::vector<double>(n, 1.0 / double(n))}; }
  static Weights ones(std::size_t n) { return {std::vector<double>(n, 1.0)}; }

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] double sum() const noexcept;

  /// Throws ParameterError on negative entries or a violated rule.
  void validate(WeightRule rule) const;
};

struct CompositionSpec {
  Generator generator;
  std::vector<Kernel> children;
  Weights weights;
  /// d_i per child; empty means "take the children's dimensions".
  std::vector<std::size_t> partition;
  /// Overrides the generator's own rule (space-time constructions use trivial_ones).
  std::optional<WeightRule> weight_rule;

  [[nodiscard]] WeightRule rule() const { return weight_rule.value_or(generator.weight_rule()); }
  [[nodiscard]] std::size_t dim() const;
  /// Throws ParameterError when an invariant fails.
  void validate() const;
};

/// phi(sum_i w_i phi^-1(values_i)). Zero weights drop their term. A value
/// outside phi^-1's domain raises DomainError naming its index.
[[nodiscard]] double quasi_arithmetic(const Generator& g, std::span<const double> values,
                                      std::span<const double> weights);

/// Lazy kernel x = (x_1, ..., x_n) -> phi(sum_i theta_i phi^-1(f_i(x_i))).
[[nodiscard]] Kernel compose(const CompositionSpec& spec);

/// Q_outer(Q_inner(C_1..C_k), C_{k+1}..C_n). `weights` has one entry for the
/// inner block followed by one per extra child. A non-empty `partition` must
/// equal (inner dim, extra dims...).
[[nodiscard]] Kernel nest(const Generator& outer, const CompositionSpec& inner,
                          const std::vector<Kernel>& extra_children, const Weights& weights,
                          const std::vector<std::size_t>& partition = {});

struct SubadditivityReport {
  bool holds = true;
  std::optional<std::pair<double, double>> witness;
  double worst_excess = 0.0;  // max of g(a+b) - g(a) - g(b)
};

/// Checks g = phi1^-1 o phi2 for g(a+b) <= g(a) + g(b) over all grid pairs.
[[nodiscard]] SubadditivityReport check_subadditive(const Generator& g1, const Generator& g2,
                                                    std::span<const double> grid);

struct OrderingViolation {
  std::string relation;  // e.g. "Q[0] <= Q[2]", "Q_G <= Q[1]"
  std::vector<double> location;
  double excess;
};

struct OrderingReport {
  std::vector<std::string> names;
  /// leq[i][j]: Q_i <= Q_j + slack at every point.
  std::vector<std::vector<bool>> leq;
  /// Q_G <= Q_i with Q_G = prod f_i^theta_i.
  std::vector<bool> above_geometric;
  /// Q_i <= Q_A with Q_A = sum theta_i f_i.
  std::vector<bool> below_arithmetic;
  /// First violation per failing relation.
  std::vector<OrderingViolation> violations;

  [[nodiscard]] bool sandwich(std::size_t i) const { return above_geometric[i] && below_arithmetic[i]; }
};

/// Specs must share children, weights and partition.
[[nodiscard]] OrderingReport ordering_report(const std::vector<CompositionSpec>& specs,
                                             const PointSet& points);

}  // namespace qam
