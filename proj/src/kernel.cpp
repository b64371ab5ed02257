#include "qam/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

std::string tag(const char* base, std::initializer_list<double> params) {
  std::ostringstream os;
  os << base << '(';
  bool first = true;
  for (double p : params) {
    os << (first ? "" : ", ") << p;
    first = false;
  }
  os << ')';
  return os.str();
}

}  // namespace

Kernel::Kernel(std::string name, std::size_t dim, Fn fn)
    : impl_(std::make_shared<const Impl>(Impl{std::move(name), dim, std::move(fn)})) {
  if (dim == 0) throw ParameterError("kernel: dimension must be >= 1");
}

double Kernel::operator()(std::span<const double> lag) const {
  if (lag.size() != impl_->dim) {
    std::ostringstream os;
    os << "kernel " << impl_->name << ": lag has " << lag.size() << " components, expected "
       << impl_->dim;
    throw DomainError(os.str());
  }
  return impl_->fn(lag);
}

double Kernel::radial(double r) const {
  std::vector<double> lag(impl_->dim, 0.0);
  lag[0] = r;
  return impl_->fn(lag);
}

double euclidean_norm(std::span<const double> v) noexcept {
  if (v.size() == 1) return std::abs(v[0]);
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace kernels {

Kernel constant(double value, std::size_t dim) {
  return Kernel(tag("constant", {value}), dim, [value](std::span<const double>) { return value; });
}

Kernel exponential(double variance, double scale, std::size_t dim) {
  require(variance > 0.0 && scale > 0.0, "exponential kernel: variance > 0 and scale > 0 required");
  return Kernel(tag("exponential", {variance, scale}), dim, [variance, scale](std::span<const double> h) {
    return variance * std::exp(-euclidean_norm(h) / scale);
  });
}

Kernel gaussian(double variance, double scale, std::size_t dim) {
  require(variance > 0.0 && scale > 0.0, "gaussian kernel: variance > 0 and scale > 0 required");
  return Kernel(tag("gaussian", {variance, scale}), dim, [variance, scale](std::span<const double> h) {
    const double r = euclidean_norm(h) / scale;
    return variance * std::exp(-r * r);
  });
}

Kernel cauchy(double lambda, std::size_t dim) {
  require(lambda > 0.0, "cauchy kernel: lambda > 0 required");
  return Kernel(tag("cauchy", {lambda}), dim, [lambda](std::span<const double> h) {
    return std::exp(-std::log1p(euclidean_norm(h)) / lambda);
  });
}

Kernel generalized_cauchy(double delta, double epsilon, std::size_t dim) {
  require(delta > 0.0 && delta <= 2.0, "generalized_cauchy kernel: delta in (0, 2] required");
  require(epsilon > 0.0, "generalized_cauchy kernel: epsilon > 0 required");
  return Kernel(tag("generalized_cauchy", {delta, epsilon}), dim,
                [delta, epsilon](std::span<const double> h) {
                  return std::exp(-epsilon * std::log1p(std::pow(euclidean_norm(h), delta)));
                });
}

Kernel stretched_exponential(double power, std::size_t dim) {
  require(power > 0.0 && power <= 2.0, "stretched_exponential kernel: power in (0, 2] required");
  return Kernel(tag("stretched_exponential", {power}), dim, [power](std::span<const double> h) {
    return std::exp(-std::pow(euclidean_norm(h), power));
  });
}

Kernel spherical(double range, std::size_t dim) {
  require(range > 0.0, "spherical kernel: range > 0 required");
  return Kernel(tag("spherical", {range}), dim, [range](std::span<const double> h) {
    const double r = euclidean_norm(h) / range;
    return r >= 1.0 ? 0.0 : 1.0 - 1.5 * r + 0.5 * r * r * r;
  });
}

Kernel power_law(double rho, std::size_t dim) {
  require(rho > 0.0, "power_law kernel: rho > 0 required");
  return Kernel(tag("power_law", {rho}), dim, [rho](std::span<const double> h) {
    const double r = euclidean_norm(h);
    return r == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(r, -rho);
  });
}

Kernel product(std::vector<Kernel> children) {
  require(!children.empty(), "product kernel: at least one child required");
  std::size_t dim = 0;
  std::string name = "product(";
  for (std::size_t i = 0; i < children.size(); ++i) {
    dim += children[i].dim();
    name += (i ? ", " : "") + children[i].name();
  }
  name += ')';
  return Kernel(std::move(name), dim, [children = std::move(children)](std::span<const double> h) {
    double v = 1.0;
    std::size_t offset = 0;
    for (const auto& c : children) {
      v *= c.eval(h.subspan(offset, c.dim()));
      offset += c.dim();
    }
    return v;
  });
}

}  // namespace kernels
}  // namespace qam
