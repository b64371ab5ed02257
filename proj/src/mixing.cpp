#include "qam/mixing.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

MixingMeasure MixingMeasure::lebesgue() { return MixingMeasure(); }

MixingMeasure MixingMeasure::exp_weight() {
  MixingMeasure m;
  m.kind_ = Kind::exp_weight;
  return m;
}

MixingMeasure MixingMeasure::gamma(double shape, double rate) {
  require(shape > 0.0 && std::isfinite(shape), "gamma measure: shape > 0 required");
  require(rate > 0.0 && std::isfinite(rate), "gamma measure: rate > 0 required");
  MixingMeasure m;
  m.kind_ = Kind::gamma;
  m.a_ = shape;
  m.b_ = rate;
  return m;
}

MixingMeasure MixingMeasure::point_mass(double location, double mass) {
  require(location >= 0.0 && std::isfinite(location), "point_mass measure: location >= 0 required");
  require(mass > 0.0 && std::isfinite(mass), "point_mass measure: mass > 0 required");
  MixingMeasure m;
  m.kind_ = Kind::point_mass;
  m.atoms_ = {{location, mass}};
  return m;
}

MixingMeasure MixingMeasure::discrete(std::vector<double> locations, std::vector<double> weights) {
  require(!locations.empty() && locations.size() == weights.size(),
          "discrete measure: locations and weights must be non-empty and of equal length");
  MixingMeasure m;
  m.kind_ = Kind::discrete;
  for (std::size_t j = 0; j < locations.size(); ++j) {
    require(locations[j] >= 0.0 && std::isfinite(locations[j]), "discrete measure: locations >= 0 required");
    require(weights[j] > 0.0 && std::isfinite(weights[j]), "discrete measure: weights > 0 required");
    m.atoms_.emplace_back(locations[j], weights[j]);
  }
  return m;
}

bool MixingMeasure::probability() const { return std::abs(total_mass() - 1.0) <= 1e-12; }

double MixingMeasure::total_mass() const {
  switch (kind_) {
    case Kind::lebesgue:
      return std::numeric_limits<double>::infinity();
    case Kind::exp_weight:
    case Kind::gamma:
      return 1.0;
    case Kind::point_mass:
    case Kind::discrete: {
      double s = 0.0;
      for (const auto& [x, w] : atoms_) s += w;
      return s;
    }
  }
  return 0.0;
}

double MixingMeasure::density(double tau) const {
  switch (kind_) {
    case Kind::lebesgue:
      return 1.0;
    case Kind::exp_weight:
      return std::exp(-tau);
    case Kind::gamma:
      if (tau == 0.0) return a_ < 1.0 ? std::numeric_limits<double>::infinity() : (a_ == 1.0 ? b_ : 0.0);
      return std::exp(a_ * std::log(b_) + (a_ - 1.0) * std::log(tau) - b_ * tau - std::lgamma(a_));
    case Kind::point_mass:
    case Kind::discrete:
      break;
  }
  throw DomainError("mixing measure: atomic measures have no density");
}

double MixingMeasure::origin_exponent() const { return kind_ == Kind::gamma ? a_ - 1.0 : 0.0; }

bool MixingMeasure::exponential_tail() const { return kind_ == Kind::exp_weight || kind_ == Kind::gamma; }

double MixingMeasure::laplace(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("laplace transform: argument >= 0 required");
  switch (kind_) {
    case Kind::lebesgue:
      return x == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / x;
    case Kind::exp_weight:
      return 1.0 / (1.0 + x);
    case Kind::gamma:
      return std::exp(-a_ * std::log1p(x / b_));
    case Kind::point_mass:
    case Kind::discrete: {
      double s = 0.0;
      for (const auto& [r, w] : atoms_) s += w * std::exp(-x * r);
      return s;
    }
  }
  return 0.0;
}

double sample_gamma(double shape, StreamRng& rng) {
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    double u = rng.uniform();
    while (u == 0.0) u = rng.uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double MixingMeasure::sample(StreamRng& rng) const {
  if (!probability()) throw DomainError("mixing measure " + name() + ": sampling needs a probability measure");
  switch (kind_) {
    case Kind::exp_weight:
      return sample_gamma(1.0, rng);
    case Kind::gamma:
      return sample_gamma(a_, rng) / b_;
    case Kind::point_mass:
      return atoms_[0].first;
    case Kind::discrete: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (const auto& [r, w] : atoms_) {
        acc += w;
        if (u < acc) return r;
      }
      return atoms_.back().first;
    }
    case Kind::lebesgue:
      break;
  }
  throw DomainError("mixing measure: cannot sample");
}

std::string_view to_string(MixingMeasure::Kind k) {
  switch (k) {
    case MixingMeasure::Kind::lebesgue:
      return "lebesgue";
    case MixingMeasure::Kind::exp_weight:
      return "exp_weight";
    case MixingMeasure::Kind::gamma:
      return "gamma";
    case MixingMeasure::Kind::point_mass:
      return "point_mass";
    case MixingMeasure::Kind::discrete:
      return "discrete";
  }
  return "unknown";
}

std::string MixingMeasure::name() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == Kind::gamma) os << '(' << a_ << ", " << b_ << ')';
  if (atomic()) {
    os << '(';
    for (std::size_t j = 0; j < atoms_.size(); ++j) os << (j ? ", " : "") << atoms_[j].second << '@' << atoms_[j].first;
    os << ')';
  }
  return os.str();
}

}  // namespace qam
