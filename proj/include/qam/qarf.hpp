#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qam/generators.hpp"
#include "qam/kernel.hpp"
#include "qam/mixing.hpp"
#include "qam/permissibility.hpp"
#include "qam/points.hpp"

namespace qam {

/// Increasing concave nu on [0, inf) with nu(0) = 0.
class ExponentFunction {
 public:
  enum class Kind { linear, power, log1p, shifted_power, callable };

  /// c t
  static ExponentFunction linear(double c = 1.0);
  /// c t^beta, beta in (0, 1]
  static ExponentFunction power(double c, double beta);
  /// c ln(1 + t)
  static ExponentFunction log1p(double c);
  /// c ((1 + t)^rho - 1), rho in (0, 1]
  static ExponentFunction shifted_power(double c, double rho);
  static ExponentFunction callable(std::string name, std::function<double(double)> fn);
  /// phi^-1 o child.radial: the exponent recovering `child` under generator phi.
  static ExponentFunction from_generator(const Generator& phi, const Kernel& child);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] double shape() const noexcept { return p_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  /// e^{-nu(t)} ~ t^{-p} at infinity when known, otherwise 0.
  [[nodiscard]] double tail_power() const noexcept;

 private:
  ExponentFunction() = default;
  Kind kind_ = Kind::linear;
  double c_ = 1.0, p_ = 1.0;
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> fn_;
};

[[nodiscard]] std::string_view to_string(ExponentFunction::Kind k);

/// Z(x) = sqrt(variance) prod_i Z_i(x_i) with Z_i given R = r having
/// covariance exp(-r nu_i(|h_i|)), R ~ F shared by all components.
struct QarfSpec {
  std::vector<ExponentFunction> exponents;  // one per block, time last when temporal
  std::vector<std::size_t> partition;       // block sizes; empty = all 1
  MixingMeasure measure = MixingMeasure::point_mass(1.0);
  double variance = 1.0;
  bool temporal = true;
  /// Independent R_i ~ F_i per block (covariance only); empty = line-concentrated.
  std::vector<MixingMeasure> independent;

  [[nodiscard]] std::size_t blocks() const noexcept { return exponents.size(); }
  [[nodiscard]] std::size_t block_dim(std::size_t i) const { return partition.empty() ? 1 : partition[i]; }
  [[nodiscard]] std::size_t dim() const;

  /// Concavity and integrability of every nu_i, finite F, positive variance.
  void validate() const;
};

/// variance * L_F(sum_i nu_i(|lag_i|)), |.| the Euclidean norm of block i.
[[nodiscard]] double theoretical_cov(const QarfSpec& spec, std::span<const double> lag);
/// Spatial lag h and time lag u of a temporal spec.
[[nodiscard]] double theoretical_cov(const QarfSpec& spec, std::span<const double> h, double u);
/// Stationary Kernel view of theoretical_cov.
[[nodiscard]] Kernel qarf_kernel(const QarfSpec& spec);

/// replicates x points samples. Replicate r uses streams (seed, r, 0) for R and
/// (seed, r, i + 1) for component i, so the output does not depend on the
/// thread count.
[[nodiscard]] Eigen::MatrixXd simulate(const QarfSpec& spec, const PointSet& points, std::size_t replicates,
                                       std::uint64_t seed);
[[nodiscard]] Eigen::MatrixXd simulate_serial(const QarfSpec& spec, const PointSet& points,
                                              std::size_t replicates, std::uint64_t seed);

struct EmpiricalCov {
  double value = 0.0;
  double se = 0.0;  // replicate standard error
};

/// Mean of Z_i Z_j over replicates (the field has mean zero).
[[nodiscard]] EmpiricalCov empirical_covariance(const Eigen::MatrixXd& samples, std::size_t i, std::size_t j);

/// (1/pi) int_0^inf cos(w h) c(h) dh for each w, summed over half-period
/// panels with Wynn epsilon acceleration. Throws NumericError on failure.
[[nodiscard]] double cosine_transform(const std::function<double(double)>& c, double omega);

/// Cosine transform of exp(-r nu(h)).
[[nodiscard]] std::vector<double> spectral_density_1d(const ExponentFunction& nu, double r,
                                                      std::span<const double> omega_grid);

struct MomentVerdict {
  int k = 0;
  bool finite = false;
  double value = 0.0;                // Richardson-extrapolated moment when finite
  std::vector<double> partial_sums;  // int_{-W_j}^{W_j} w^{2k} c^(w) dw, W_j = 2^j
  double last_ratio = 0.0;
};

struct ChiProbe {
  double r = 0.0;
  std::vector<bool> finite;  // per k
};

struct MsDiffReport {
  std::size_t coordinate = 0;
  std::vector<MomentVerdict> moments;  // k = 0..k_max
  std::vector<ChiProbe> probe;
  bool probe_finite = true;
  /// Largest k with all moments 0..k finite, -1 when none.
  int differentiable_order = -1;
};

inline constexpr int kMomentBands = 12;
inline constexpr double kDivergenceRatio = 1.0 - 1e-3;

/// Spectral-moment classifier for block `coordinate` (one-dimensional blocks).
[[nodiscard]] MsDiffReport ms_diff_order(const QarfSpec& spec, std::size_t coordinate, int k_max);
[[nodiscard]] MsDiffReport ms_diff_order_serial(const QarfSpec& spec, std::size_t coordinate, int k_max);

}  // namespace qam
