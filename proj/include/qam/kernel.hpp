#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qam {

/// A stationary covariance (or more generally a lag function) on R^dim.
///
/// Cheap to copy; the evaluator is shared and immutable, so a Kernel can be
/// evaluated concurrently from any number of threads.
class Kernel {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Kernel(std::string name, std::size_t dim, Fn fn);

  /// Throws DomainError when lag.size() != dim().
  double operator()(std::span<const double> lag) const;
  double operator()(std::initializer_list<double> lag) const {
    return (*this)(std::span<const double>(lag.begin(), lag.size()));
  }

  /// Unchecked evaluation for inner loops.
  [[nodiscard]] double eval(std::span<const double> lag) const { return impl_->fn(lag); }

  [[nodiscard]] std::size_t dim() const noexcept { return impl_->dim; }
  [[nodiscard]] const std::string& name() const noexcept { return impl_->name; }

  /// Value at lag (r, 0, ..., 0): the radial profile of an isotropic kernel.
  [[nodiscard]] double radial(double r) const;

 private:
  struct Impl {
    std::string name;
    std::size_t dim;
    Fn fn;
  };
  std::shared_ptr<const Impl> impl_;
};

[[nodiscard]] double euclidean_norm(std::span<const double> v) noexcept;

namespace kernels {

Kernel constant(double value, std::size_t dim = 1);
/// variance * exp(-|h| / scale)
Kernel exponential(double variance = 1.0, double scale = 1.0, std::size_t dim = 1);
/// variance * exp(-(|h| / scale)^2)
Kernel gaussian(double variance = 1.0, double scale = 1.0, std::size_t dim = 1);
/// (1 + |h|)^{-1/lambda}
Kernel cauchy(double lambda, std::size_t dim = 1);
/// (1 + |h|^delta)^{-epsilon}, delta in (0, 2], epsilon > 0
Kernel generalized_cauchy(double delta, double epsilon, std::size_t dim = 1);
/// exp(-|h|^power), power in (0, 2]
Kernel stretched_exponential(double power, std::size_t dim = 1);
/// Compactly supported spherical model with the given range.
Kernel spherical(double range = 1.0, std::size_t dim = 1);
/// |h|^{-rho}; not a covariance (singular at 0), usable as a composition child.
Kernel power_law(double rho, std::size_t dim = 1);
/// prod_i children[i](lag block i); blocks follow the children's dimensions.
Kernel product(std::vector<Kernel> children);

}  // namespace kernels
}  // namespace qam
