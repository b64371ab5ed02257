#include "qam/points.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qam/error.hpp"
#include "qam/random.hpp"

namespace qam {

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw ParameterError("point set: dimension must be >= 1");
  if (coords_.size() % dim_ != 0) {
    std::ostringstream os;
    os << "point set: " << coords_.size() << " coordinates is not a multiple of dimension " << dim_;
    throw ParameterError(os.str());
  }
}

void PointSet::push_back(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_) throw DomainError("point set: point has wrong dimension");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointSet PointSet::uniform(std::size_t n, std::span<const double> lo, std::span<const double> hi,
                           std::uint64_t seed) {
  if (lo.size() != hi.size() || lo.empty()) throw ParameterError("point set: box bounds mismatch");
  const std::size_t d = lo.size();
  StreamRng rng(seed, 0x9017, 0);
  std::vector<double> c(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) c[i * d + k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
  }
  return PointSet(d, std::move(c));
}

PointSet PointSet::unit_cube(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::vector<double> lo(dim, 0.0), hi(dim, 1.0);
  return uniform(n, lo, hi, seed);
}

PointSet deduplicate(const PointSet& points, std::size_t* removed) {
  std::map<std::vector<double>, bool> seen;
  PointSet out(points.dim(), {});
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    std::vector<double> key(p.begin(), p.end());
    if (seen.emplace(std::move(key), true).second) {
      out.push_back(p);
    } else {
      ++dropped;
    }
  }
  if (removed) *removed = dropped;
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw ParameterError("log grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (!(hi > lo) || n < 2) throw ParameterError("linear grid: need lo < hi and n >= 2");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
  g.back() = hi;
  return g;
}

}  // namespace qam
