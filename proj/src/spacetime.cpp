#include "qam/spacetime.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

void check_dim(std::size_t d) { require(d >= 1, "space-time kernel: spatial dimension must be >= 1"); }

void check_lambdas(const char* family, double l1, double l2, double l3, bool strict) {
  require(l1 > 0.0 && l2 > 0.0 && l3 > 0.0, std::string(family) + ": lambda_i > 0 required");
  const bool ok = strict ? (l1 < l2 && l1 < l3) : (l1 <= l2 && l1 <= l3);
  if (!ok) {
    std::ostringstream os;
    os << family << ": lambda1 < lambda_i required (lambda1 = " << l1 << ", lambda2 = " << l2
       << ", lambda3 = " << l3 << ")";
    throw ParameterError(os.str());
  }
}

constexpr std::array<std::pair<SpaceTimeFamily, const char*>, 7> kFamilies{{
    {SpaceTimeFamily::clayton, "clayton"},
    {SpaceTimeFamily::gumbel, "gumbel"},
    {SpaceTimeFamily::power_series, "power_series"},
    {SpaceTimeFamily::frank, "frank"},
    {SpaceTimeFamily::cauchy_margin, "cauchy_margin"},
    {SpaceTimeFamily::separable, "separable"},
    {SpaceTimeFamily::custom_composition, "custom_composition"},
}};

// 1 - (1 - e^{-|h|})^{1/lambda}
Kernel power_series_margin(double lambda, std::size_t dim) {
  std::ostringstream os;
  os << "power_series_margin(" << lambda << ")";
  return Kernel(os.str(), dim, [lambda](std::span<const double> h) {
    const double r = euclidean_norm(h);
    return -std::expm1(std::log(-std::expm1(-r)) / lambda);
  });
}

}  // namespace

std::string_view to_string(SpaceTimeFamily f) {
  for (const auto& [k, n] : kFamilies) {
    if (k == f) return n;
  }
  return "unknown";
}

SpaceTimeFamily parse_spacetime_family(std::string_view name) {
  for (const auto& [k, n] : kFamilies) {
    if (name == n) return k;
  }
  std::string valid;
  for (const auto& [k, n] : kFamilies) {
    if (k == SpaceTimeFamily::separable || k == SpaceTimeFamily::custom_composition) continue;
    valid += valid.empty() ? "" : ", ";
    valid += n;
  }
  throw ConfigError("unknown space-time family '" + std::string(name) + "' (valid: " + valid + ")");
}

std::string_view to_string(VariogramSpec::Kind k) {
  switch (k) {
    case VariogramSpec::Kind::linear:
      return "linear";
    case VariogramSpec::Kind::power:
      return "power";
    case VariogramSpec::Kind::nugget_power:
      return "nugget_power";
  }
  return "unknown";
}

void VariogramSpec::validate() const {
  require(scale > 0.0 && std::isfinite(scale), "variogram: scale > 0 required");
  if (kind != Kind::linear) require(beta > 0.0 && beta <= 2.0, "variogram: beta in (0, 2] required");
  if (kind == Kind::nugget_power) require(nugget >= 0.0 && std::isfinite(nugget), "variogram: nugget >= 0 required");
}

double VariogramSpec::operator()(double r) const {
  switch (kind) {
    case Kind::linear:
      return scale * r;
    case Kind::power:
      return scale * std::pow(r, beta);
    case Kind::nugget_power:
      return r == 0.0 ? 0.0 : nugget + scale * std::pow(r, beta);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SpaceTimeKernel::SpaceTimeKernel(SpaceTimeFamily family, std::size_t spatial_dim,
                                 std::map<std::string, double> params, Fn fn,
                                 std::optional<CompositionSpec> composition)
    : impl_(std::make_shared<const Impl>(
          Impl{family, spatial_dim, std::move(params), std::move(fn), std::move(composition)})) {
  check_dim(spatial_dim);
}

double SpaceTimeKernel::operator()(std::span<const double> h, double u) const {
  if (h.size() != impl_->dim) {
    std::ostringstream os;
    os << "space-time kernel " << name() << ": spatial lag has " << h.size() << " components, expected "
       << impl_->dim;
    throw DomainError(os.str());
  }
  return impl_->fn(h, u);
}

std::string SpaceTimeKernel::name() const {
  std::ostringstream os;
  os << to_string(impl_->family) << '(';
  bool first = true;
  for (const auto& [k, v] : impl_->params) {
    os << (first ? "" : ", ") << k << '=' << v;
    first = false;
  }
  os << ')';
  return os.str();
}

Kernel SpaceTimeKernel::as_kernel() const {
  auto impl = impl_;
  return Kernel(name(), impl_->dim + 1, [impl](std::span<const double> lag) {
    return impl->fn(lag.first(impl->dim), lag[impl->dim]);
  });
}

Kernel SpaceTimeKernel::spatial_margin() const {
  auto impl = impl_;
  return Kernel(name() + ".spatial", impl_->dim,
                [impl](std::span<const double> h) { return impl->fn(h, 0.0); });
}

Kernel SpaceTimeKernel::temporal_margin() const {
  auto impl = impl_;
  return Kernel(name() + ".temporal", 1, [impl](std::span<const double> u) {
    const std::vector<double> zero(impl->dim, 0.0);
    return impl->fn(zero, u[0]);
  });
}

SpaceTimeKernel clayton(double l1, double l2, double l3, double sigma2, std::size_t d, bool strict) {
  check_dim(d);
  check_lambdas("clayton", l1, l2, l3, strict);
  require(sigma2 > 0.0 && std::isfinite(sigma2), "clayton: sigma2 > 0 required");
  const double r1 = l1 / l2, r2 = l1 / l3;
  CompositionSpec comp{Generator(GeneratorKind::clayton, {l1}),
                       {kernels::cauchy(l2, d), kernels::cauchy(l3, 1)},
                       Weights::ones(2),
                       {d, 1},
                       WeightRule::trivial_ones};
  return SpaceTimeKernel(
      SpaceTimeFamily::clayton, d, {{"lambda1", l1}, {"lambda2", l2}, {"lambda3", l3}, {"sigma2", sigma2}},
      [=](std::span<const double> h, double u) {
        // (1+a)^r - 1 via expm1 keeps the margins exact to rounding
        const double a = std::expm1(r1 * std::log1p(euclidean_norm(h)));
        const double b = std::expm1(r2 * std::log1p(std::abs(u)));
        return sigma2 * std::exp(-std::log1p(a + b) / l1);
      },
      std::move(comp));
}

SpaceTimeKernel gumbel(double l1, double l2, double l3, double sigma2, std::size_t d, bool strict) {
  check_dim(d);
  require(l1 >= 1.0, "gumbel: lambda1 >= 1 required");
  check_lambdas("gumbel", l1, l2, l3, strict);
  require(sigma2 > 0.0 && std::isfinite(sigma2), "gumbel: sigma2 > 0 required");
  const double r1 = l1 / l2, r2 = l1 / l3;
  CompositionSpec comp{Generator(GeneratorKind::gumbel, {l1}),
                       {kernels::stretched_exponential(1.0 / l2, d), kernels::stretched_exponential(1.0 / l3, 1)},
                       Weights::ones(2),
                       {d, 1},
                       WeightRule::trivial_ones};
  return SpaceTimeKernel(
      SpaceTimeFamily::gumbel, d, {{"lambda1", l1}, {"lambda2", l2}, {"lambda3", l3}, {"sigma2", sigma2}},
      [=](std::span<const double> h, double u) {
        const double s = std::pow(euclidean_norm(h), r1) + std::pow(std::abs(u), r2);
        return sigma2 * std::exp(-std::pow(s, 1.0 / l1));
      },
      std::move(comp));
}

SpaceTimeKernel power_series(double l1, double l2, double l3, std::size_t d, bool strict) {
  check_dim(d);
  require(l1 >= 1.0, "power_series: lambda1 >= 1 required");
  check_lambdas("power_series", l1, l2, l3, strict);
  const double r1 = l1 / l2, r2 = l1 / l3;
  CompositionSpec comp{Generator(GeneratorKind::power_series, {l1}),
                       {power_series_margin(l2, d), power_series_margin(l3, 1)},
                       Weights::ones(2),
                       {d, 1},
                       WeightRule::trivial_ones};
  return SpaceTimeKernel(
      SpaceTimeFamily::power_series, d, {{"lambda1", l1}, {"lambda2", l2}, {"lambda3", l3}},
      [=](std::span<const double> h, double u) {
        const double a = std::pow(-std::expm1(-euclidean_norm(h)), r1);
        const double b = std::pow(-std::expm1(-std::abs(u)), r2);
        return 1.0 - a - b + a * b;
      },
      std::move(comp));
}

SpaceTimeKernel frank(double lambda, const VariogramSpec& gs, const VariogramSpec& gt, std::size_t d) {
  check_dim(d);
  require(lambda > 0.0 && std::isfinite(lambda), "frank: lambda > 0 required");
  gs.validate();
  gt.validate();
  const double denom = -std::expm1(-lambda);
  return SpaceTimeKernel(
      SpaceTimeFamily::frank, d,
      {{"lambda", lambda},
       {"gs_scale", gs.scale},
       {"gs_beta", gs.beta},
       {"gs_nugget", gs.nugget},
       {"gt_scale", gt.scale},
       {"gt_beta", gt.beta},
       {"gt_nugget", gt.nugget}},
      [=](std::span<const double> h, double u) {
        const double a = -std::expm1(-lambda * gs(euclidean_norm(h)));
        const double b = -std::expm1(-lambda * gt(std::abs(u)));
        return -std::log1p(a * b / denom) / lambda;
      });
}

SpaceTimeKernel cauchy_margins(double alpha, double delta, double epsilon, double rho, std::size_t d) {
  check_dim(d);
  require(delta > 0.0 && delta <= 2.0, "cauchy_margin: delta in (0, 2] required");
  require(alpha > 0.0 && epsilon > 0.0 && rho > 0.0, "cauchy_margin: alpha, epsilon, rho > 0 required");
  if (!(alpha < epsilon && alpha < rho)) {
    std::ostringstream os;
    os << "cauchy_margin: alpha < epsilon and alpha < rho required (alpha = " << alpha
       << ", epsilon = " << epsilon << ", rho = " << rho << ")";
    throw ParameterError(os.str());
  }
  CompositionSpec comp{Generator(GeneratorKind::power_law, {alpha}),
                       {kernels::generalized_cauchy(delta, epsilon, d), kernels::power_law(rho, 1)},
                       Weights::ones(2),
                       {d, 1},
                       WeightRule::trivial_ones};
  return SpaceTimeKernel(
      SpaceTimeFamily::cauchy_margin, d, {{"alpha", alpha}, {"delta", delta}, {"epsilon", epsilon}, {"rho", rho}},
      [=](std::span<const double> h, double u) {
        const double s = std::exp(epsilon / alpha * std::log1p(std::pow(euclidean_norm(h), delta)));
        const double t = std::pow(std::abs(u), rho / alpha);
        return std::exp(-alpha * std::log(s + t));
      },
      std::move(comp));
}

SpaceTimeKernel separable(const Kernel& spatial, const Kernel& temporal) {
  require(temporal.dim() == 1, "separable: temporal kernel must be one-dimensional");
  return SpaceTimeKernel(SpaceTimeFamily::separable, spatial.dim(), {},
                         [spatial, temporal](std::span<const double> h, double u) {
                           return spatial.eval(h) * temporal.eval(std::span<const double>(&u, 1));
                         });
}

SpaceTimeKernel from_composition(const CompositionSpec& spec) {
  const Kernel k = compose(spec);
  require(spec.children.back().dim() == 1, "custom_composition: the last child must act on the time lag");
  const std::size_t d = k.dim() - 1;
  require(d >= 1, "custom_composition: at least one spatial dimension required");
  return SpaceTimeKernel(
      SpaceTimeFamily::custom_composition, d, {},
      [k, d](std::span<const double> h, double u) {
        double buf[17];
        std::vector<double> heap;
        double* lag = buf;
        if (d + 1 > 17) {
          heap.resize(d + 1);
          lag = heap.data();
        }
        for (std::size_t i = 0; i < d; ++i) lag[i] = h[i];
        lag[d] = u;
        return k.eval({lag, d + 1});
      },
      spec);
}

Kernel affine_anisotropy(const Generator& phi, const std::vector<double>& theta,
                         const std::vector<std::size_t>& partition) {
  require(phi.completely_monotone(), "affine_anisotropy: completely monotone generator required");
  require(!theta.empty(), "affine_anisotropy: theta must not be empty");
  for (double t : theta) require(t > 0.0 && std::isfinite(t), "affine_anisotropy: theta must be strictly positive");
  std::vector<std::size_t> blocks = partition.empty() ? std::vector<std::size_t>(theta.size(), 1) : partition;
  require(blocks.size() == theta.size(), "affine_anisotropy: partition length must match theta");
  std::size_t dim = 0;
  for (auto b : blocks) {
    require(b >= 1, "affine_anisotropy: partition entries must be >= 1");
    dim += b;
  }
  std::ostringstream os;
  os << "affine[" << phi.name() << "](";
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
  os << ')';
  return Kernel(os.str(), dim, [phi, theta, blocks](std::span<const double> h) {
    double s = 0.0;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      s += theta[i] * euclidean_norm(h.subspan(offset, blocks[i]));
      offset += blocks[i];
    }
    return phi.phi(s);
  });
}

double separability_defect(const SpaceTimeKernel& k, std::span<const double> h, double u) {
  const std::vector<double> zero(k.spatial_dim(), 0.0);
  const double c00 = k(zero, 0.0);
  if (!(c00 > 0.0) || c00 == kInf) {
    std::ostringstream os;
    os << "separability_defect: degenerate kernel " << k.name() << ", C(0,0) = " << c00;
    throw DomainError(os.str());
  }
  return k(h, u) - k(h, 0.0) * k(zero, u) / c00;
}

}  // namespace qam
