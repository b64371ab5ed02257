#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qam/compose.hpp"
#include "qam/generators.hpp"
#include "qam/kernel.hpp"

namespace qam {

enum class SpaceTimeFamily { clayton, gumbel, power_series, frank, cauchy_margin, separable, custom_composition };

[[nodiscard]] std::string_view to_string(SpaceTimeFamily f);
/// Throws ConfigError listing the valid names.
[[nodiscard]] SpaceTimeFamily parse_spacetime_family(std::string_view name);

/// Intrinsically stationary variogram of the lag norm.
struct VariogramSpec {
  enum class Kind { linear, power, nugget_power };
  Kind kind = Kind::linear;
  double scale = 1.0;
  double beta = 1.0;    // power, nugget_power: exponent in (0, 2]
  double nugget = 0.0;  // nugget_power only

  void validate() const;
  [[nodiscard]] double operator()(double r) const;
};

[[nodiscard]] std::string_view to_string(VariogramSpec::Kind k);

/// Stationary covariance C(h, u), h in R^d, u in R.
class SpaceTimeKernel {
 public:
  using Fn = std::function<double(std::span<const double>, double)>;

  SpaceTimeKernel(SpaceTimeFamily family, std::size_t spatial_dim, std::map<std::string, double> params,
                  Fn fn, std::optional<CompositionSpec> composition = std::nullopt);

  /// Throws DomainError when h.size() != spatial_dim().
  double operator()(std::span<const double> h, double u) const;
  double operator()(std::initializer_list<double> h, double u) const {
    return (*this)(std::span<const double>(h.begin(), h.size()), u);
  }

  [[nodiscard]] SpaceTimeFamily family() const noexcept { return impl_->family; }
  [[nodiscard]] std::size_t spatial_dim() const noexcept { return impl_->dim; }
  [[nodiscard]] const std::map<std::string, double>& params() const noexcept { return impl_->params; }
  [[nodiscard]] std::string name() const;

  /// Lag (h_1..h_d, u) view on R^{d+1}.
  [[nodiscard]] Kernel as_kernel() const;
  /// h -> C(h, 0) and u -> C(0, u).
  [[nodiscard]] Kernel spatial_margin() const;
  [[nodiscard]] Kernel temporal_margin() const;
  /// The unit-variance composition this family is built from, when it has one.
  [[nodiscard]] const std::optional<CompositionSpec>& composition() const noexcept { return impl_->composition; }

 private:
  struct Impl {
    SpaceTimeFamily family;
    std::size_t dim;
    std::map<std::string, double> params;
    Fn fn;
    std::optional<CompositionSpec> composition;
  };
  std::shared_ptr<const Impl> impl_;
};

/// sigma2 [(1+|h|)^{rho1} + (1+|u|)^{rho2} - 1]^{-1/lambda1}, rho_i = lambda1 / lambda_{i+1}.
/// `strict` = false admits lambda1 = lambda_i (boundary studies).
[[nodiscard]] SpaceTimeKernel clayton(double lambda1, double lambda2, double lambda3, double sigma2,
                                      std::size_t d, bool strict = true);
/// sigma2 exp(-(|h|^{rho1} + |u|^{rho2})^{1/lambda1}), lambda1 >= 1.
[[nodiscard]] SpaceTimeKernel gumbel(double lambda1, double lambda2, double lambda3, double sigma2,
                                     std::size_t d, bool strict = true);
/// 1 - a - b + ab with a = (1 - e^{-|h|})^{rho1}, b = (1 - e^{-|u|})^{rho2}, lambda1 >= 1.
[[nodiscard]] SpaceTimeKernel power_series(double lambda1, double lambda2, double lambda3, std::size_t d,
                                           bool strict = true);
/// -(1/lambda) ln(1 + (1 - e^{-lambda gs(h)})(1 - e^{-lambda gt(u)}) / (1 - e^{-lambda})).
/// Note C(h, 0) = 0 for every h.
[[nodiscard]] SpaceTimeKernel frank(double lambda, const VariogramSpec& gs, const VariogramSpec& gt,
                                    std::size_t d);
/// [(1 + |h|^delta)^{eps/alpha} + |u|^{rho/alpha}]^{-alpha}.
[[nodiscard]] SpaceTimeKernel cauchy_margins(double alpha, double delta, double epsilon, double rho,
                                             std::size_t d);
/// spatial(h) * temporal(u).
[[nodiscard]] SpaceTimeKernel separable(const Kernel& spatial, const Kernel& temporal);
/// A composition whose last child acts on the time lag.
[[nodiscard]] SpaceTimeKernel from_composition(const CompositionSpec& spec);

/// C(h) = phi(sum_i theta_i |h_i|) with |h_i| the norm of block i; blocks of
/// size 1 by default.
[[nodiscard]] Kernel affine_anisotropy(const Generator& phi, const std::vector<double>& theta,
                                       const std::vector<std::size_t>& partition = {});

/// C(h,u) - C(h,0) C(0,u) / C(0,0). Throws DomainError when C(0,0) <= 0.
[[nodiscard]] double separability_defect(const SpaceTimeKernel& k, std::span<const double> h, double u);

}  // namespace qam
