#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qam/random.hpp"

namespace qam {

/// Positive measure F on [0, inf).
class MixingMeasure {
 public:
  enum class Kind { lebesgue, exp_weight, gamma, point_mass, discrete };

  static MixingMeasure lebesgue();
  /// e^{-tau} d tau
  static MixingMeasure exp_weight();
  /// Gamma(shape, rate) probability measure.
  static MixingMeasure gamma(double shape, double rate);
  static MixingMeasure point_mass(double location, double mass = 1.0);
  /// sum_j weights[j] delta_{locations[j]}
  static MixingMeasure discrete(std::vector<double> locations, std::vector<double> weights);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double shape() const noexcept { return a_; }
  [[nodiscard]] double rate() const noexcept { return b_; }
  [[nodiscard]] bool atomic() const noexcept { return kind_ == Kind::point_mass || kind_ == Kind::discrete; }
  /// (location, mass) pairs of an atomic measure.
  [[nodiscard]] const std::vector<std::pair<double, double>>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] bool probability() const;
  [[nodiscard]] double total_mass() const;

  /// Lebesgue density of a continuous measure.
  [[nodiscard]] double density(double tau) const;
  /// e with density ~ tau^e at 0.
  [[nodiscard]] double origin_exponent() const;
  /// Density decays exponentially.
  [[nodiscard]] bool exponential_tail() const;

  /// int e^{-x r} dF(r), closed form.
  [[nodiscard]] double laplace(double x) const;

  /// Draw from a probability measure.
  [[nodiscard]] double sample(StreamRng& rng) const;

  [[nodiscard]] std::string name() const;

 private:
  MixingMeasure() = default;
  Kind kind_ = Kind::lebesgue;
  double a_ = 0.0, b_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
};

[[nodiscard]] std::string_view to_string(MixingMeasure::Kind k);

/// Marsaglia-Tsang gamma variate with unit rate.
[[nodiscard]] double sample_gamma(double shape, StreamRng& rng);

}  // namespace qam
