#include "qam/qarf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "qam/error.hpp"
#include "qam/parallel.hpp"
#include "qam/quadrature.hpp"

namespace qam {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " > 0 required");
}

std::string fmt(const char* base, double a, double b) {
  std::ostringstream os;
  os << base << '(' << a << ", " << b << ')';
  return os.str();
}

double block_norm(std::span<const double> x) {
  if (x.size() == 1) return std::abs(x[0]);
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

ExponentFunction ExponentFunction::linear(double c) {
  require_positive(c, "exponent linear: c");
  ExponentFunction e;
  e.kind_ = Kind::linear;
  e.c_ = c;
  std::ostringstream os;
  os << "linear(" << c << ')';
  e.name_ = os.str();
  return e;
}

ExponentFunction ExponentFunction::power(double c, double beta) {
  require_positive(c, "exponent power: c");
  if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("exponent power: beta in (0, 1] required");
  ExponentFunction e;
  e.kind_ = Kind::power;
  e.c_ = c;
  e.p_ = beta;
  e.name_ = fmt("power", c, beta);
  return e;
}

ExponentFunction ExponentFunction::log1p(double c) {
  require_positive(c, "exponent log1p: c");
  ExponentFunction e;
  e.kind_ = Kind::log1p;
  e.c_ = c;
  std::ostringstream os;
  os << "log1p(" << c << ')';
  e.name_ = os.str();
  return e;
}

ExponentFunction ExponentFunction::shifted_power(double c, double rho) {
  require_positive(c, "exponent shifted_power: c");
  if (!(rho > 0.0 && rho <= 1.0)) throw ParameterError("exponent shifted_power: rho in (0, 1] required");
  ExponentFunction e;
  e.kind_ = Kind::shifted_power;
  e.c_ = c;
  e.p_ = rho;
  e.name_ = fmt("shifted_power", c, rho);
  return e;
}

ExponentFunction ExponentFunction::callable(std::string name, std::function<double(double)> fn) {
  if (!fn) throw ParameterError("exponent callable: empty function");
  ExponentFunction e;
  e.kind_ = Kind::callable;
  e.name_ = std::move(name);
  e.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
  return e;
}

ExponentFunction ExponentFunction::from_generator(const Generator& phi, const Kernel& child) {
  return callable(phi.name() + "^-1 o " + child.name(), [phi, child](double t) { return phi.phi_inv(child.radial(t)); });
}

double ExponentFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::linear:
      return c_ * t;
    case Kind::power:
      return c_ * std::pow(t, p_);
    case Kind::log1p:
      return c_ * std::log1p(t);
    case Kind::shifted_power:
      return c_ * std::expm1(p_ * std::log1p(t));
    case Kind::callable:
      return (*fn_)(t);
  }
  return 0.0;
}

std::string_view to_string(ExponentFunction::Kind k) {
  switch (k) {
    case ExponentFunction::Kind::linear: return "linear";
    case ExponentFunction::Kind::power: return "power";
    case ExponentFunction::Kind::log1p: return "log1p";
    case ExponentFunction::Kind::shifted_power: return "shifted_power";
    case ExponentFunction::Kind::callable: return "callable";
  }
  return "?";
}

double ExponentFunction::tail_power() const noexcept { return kind_ == Kind::log1p ? c_ : 0.0; }

std::size_t QarfSpec::dim() const {
  if (partition.empty()) return exponents.size();
  std::size_t d = 0;
  for (auto p : partition) d += p;
  return d;
}

void QarfSpec::validate() const {
  if (exponents.empty()) throw ParameterError("qarf: at least one exponent function required");
  if (!partition.empty()) {
    if (partition.size() != exponents.size()) {
      throw ParameterError("qarf: partition length does not match the number of exponent functions");
    }
    for (auto p : partition) {
      if (p == 0) throw ParameterError("qarf: partition blocks must be non-empty");
    }
    if (temporal && partition.back() != 1) throw ParameterError("qarf: the time block must have size 1");
  }
  require_positive(variance, "qarf: variance");
  if (!std::isfinite(measure.total_mass())) {
    throw ParameterError("qarf: mixing measure " + measure.name() + " has infinite mass");
  }
  if (!independent.empty()) {
    if (independent.size() != exponents.size()) {
      throw ParameterError("qarf: one independent mixing measure per block required");
    }
    for (const auto& m : independent) {
      if (!std::isfinite(m.total_mass())) throw ParameterError("qarf: independent measure " + m.name() + " has infinite mass");
    }
  }
  const auto grid = log_grid(1e-3, 1e2, 48);
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const auto& nu = exponents[i];
    const std::string who = "qarf: exponent " + std::to_string(i) + " (" + nu.name() + ")";
    if (std::abs(nu(0.0)) > 1e-14) throw ParameterError(who + ": nu(0) = 0 required");
    const auto rep = check_concave_increasing([&](double t) { return nu(t); }, grid);
    if (!rep.passed) {
      std::ostringstream os;
      os << who << " is not concave increasing";
      if (rep.witness) os << " near t = " << rep.witness->location.front();
      throw ParameterError(os.str());
    }
    QuadOptions o;
    o.rel_tol = 1e-6;
    o.max_intervals = 500;
    const auto r = integrate_semi_infinite([&](double t) { return std::exp(-nu(t)); }, o, {0.0, nu.tail_power()});
    if (!r.converged || !std::isfinite(r.value)) {
      throw ParameterError(who + ": exp(-nu) is not integrable on [0, inf)");
    }
  }
}

double theoretical_cov(const QarfSpec& spec, std::span<const double> lag) {
  if (lag.size() != spec.dim()) {
    std::ostringstream os;
    os << "qarf: lag of dimension " << lag.size() << ", spec has dimension " << spec.dim();
    throw DomainError(os.str());
  }
  std::size_t off = 0;
  if (spec.independent.empty()) {
    double x = 0.0;
    for (std::size_t i = 0; i < spec.blocks(); ++i) {
      const std::size_t d = spec.block_dim(i);
      x += spec.exponents[i](block_norm(lag.subspan(off, d)));
      off += d;
    }
    return spec.variance * spec.measure.laplace(x);
  }
  double c = spec.variance;
  for (std::size_t i = 0; i < spec.blocks(); ++i) {
    const std::size_t d = spec.block_dim(i);
    c *= spec.independent[i].laplace(spec.exponents[i](block_norm(lag.subspan(off, d))));
    off += d;
  }
  return c;
}

double theoretical_cov(const QarfSpec& spec, std::span<const double> h, double u) {
  if (!spec.temporal) throw DomainError("qarf: spec has no time component");
  std::vector<double> lag(h.begin(), h.end());
  lag.push_back(u);
  return theoretical_cov(spec, lag);
}

Kernel qarf_kernel(const QarfSpec& spec) {
  spec.validate();
  return Kernel("QARF[" + spec.measure.name() + "]", spec.dim(),
                [spec](std::span<const double> x) { return theoretical_cov(spec, x); });
}

namespace {

struct Block {
  std::size_t offset = 0, dim = 1;
  std::vector<std::vector<double>> unique;
  std::vector<std::size_t> index;  // point -> unique coordinate
};

std::vector<Block> split_blocks(const QarfSpec& spec, const PointSet& points) {
  std::vector<Block> blocks(spec.blocks());
  std::size_t off = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Block& bl = blocks[b];
    bl.offset = off;
    bl.dim = spec.block_dim(b);
    off += bl.dim;
    std::map<std::vector<double>, std::size_t> seen;
    bl.index.resize(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      auto x = points[j].subspan(bl.offset, bl.dim);
      std::vector<double> key(x.begin(), x.end());
      auto [it, inserted] = seen.emplace(key, bl.unique.size());
      if (inserted) bl.unique.push_back(std::move(key));
      bl.index[j] = it->second;
    }
  }
  return blocks;
}

Eigen::MatrixXd factor(const ExponentFunction& nu, const Block& bl, double r, std::size_t b) {
  const auto n = static_cast<Eigen::Index>(bl.unique.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    k(a, a) = 1.0;
    for (Eigen::Index c = 0; c < a; ++c) {
      double s = 0.0;
      for (std::size_t q = 0; q < bl.dim; ++q) {
        const double d = bl.unique[a][q] - bl.unique[c][q];
        s += d * d;
      }
      k(a, c) = k(c, a) = std::exp(-r * nu(std::sqrt(s)));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    k.diagonal().array() += 1e-12;  // one jitter retry, 1e-12 C(0)
    llt.compute(k);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "qarf simulate: Gram factorization of component " << b << " failed at R = " << r;
      throw NumericError(os.str());
    }
  }
  return llt.matrixL();
}

double draw_r(const MixingMeasure& m, double mass, StreamRng& rng) {
  if (!m.atomic()) return m.sample(rng);
  const double u = rng.uniform() * mass;
  double acc = 0.0;
  for (const auto& [r, w] : m.atoms()) {
    acc += w;
    if (u < acc) return r;
  }
  return m.atoms().back().first;
}

Eigen::MatrixXd simulate_impl(const QarfSpec& spec, const PointSet& points, std::size_t replicates,
                              std::uint64_t seed, bool parallel) {
  spec.validate();
  if (replicates == 0) throw ParameterError("qarf simulate: replicates >= 1 required");
  if (!spec.independent.empty()) {
    throw ParameterError("qarf simulate: only line-concentrated mixing measures are simulated");
  }
  if (points.dim() != spec.dim()) {
    std::ostringstream os;
    os << "qarf simulate: points of dimension " << points.dim() << ", spec has dimension " << spec.dim();
    throw DomainError(os.str());
  }
  const auto blocks = split_blocks(spec, points);
  const double mass = spec.measure.total_mass();
  const double amp = std::sqrt(spec.variance * mass);

  // discrete F: one factorization per (atom, block)
  std::vector<std::vector<Eigen::MatrixXd>> cache;
  if (spec.measure.atomic()) {
    for (const auto& [r, w] : spec.measure.atoms()) {
      cache.emplace_back();
      for (std::size_t b = 0; b < blocks.size(); ++b) cache.back().push_back(factor(spec.exponents[b], blocks[b], r, b));
    }
  }
  auto atom_index = [&](double r) {
    const auto& atoms = spec.measure.atoms();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].first == r) return a;
    }
    return atoms.size();
  };

  const std::size_t n = points.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(replicates), static_cast<Eigen::Index>(n));
  auto one = [&](std::size_t rep) {
    StreamRng rng_r(seed, rep, 0);
    const double r = draw_r(spec.measure, mass, rng_r);
    const std::size_t a = cache.empty() ? 0 : atom_index(r);
    Eigen::RowVectorXd z = Eigen::RowVectorXd::Constant(static_cast<Eigen::Index>(n), amp);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Eigen::MatrixXd local = cache.empty() ? factor(spec.exponents[b], blocks[b], r, b) : Eigen::MatrixXd();
      const Eigen::MatrixXd& l = cache.empty() ? local : cache[a][b];
      StreamRng rng(seed, rep, b + 1);
      Eigen::VectorXd xi(l.rows());
      for (Eigen::Index q = 0; q < xi.size(); ++q) xi[q] = rng.normal();
      const Eigen::VectorXd zb = l.triangularView<Eigen::Lower>() * xi;
      for (std::size_t j = 0; j < n; ++j) z[static_cast<Eigen::Index>(j)] *= zb[static_cast<Eigen::Index>(blocks[b].index[j])];
    }
    out.row(static_cast<Eigen::Index>(rep)) = z;
  };

  if (!parallel) {
    for (std::size_t rep = 0; rep < replicates; ++rep) one(rep);
    return out;
  }
  configured_threads();
  FirstError err;
  const long total = static_cast<long>(replicates);
#pragma omp parallel for schedule(dynamic, 256)
  for (long rep = 0; rep < total; ++rep) {
    try {
      one(static_cast<std::size_t>(rep));
    } catch (...) {
      err.capture(rep);
    }
  }
  err.rethrow();
  return out;
}

}  // namespace

Eigen::MatrixXd simulate(const QarfSpec& spec, const PointSet& points, std::size_t replicates, std::uint64_t seed) {
  return simulate_impl(spec, points, replicates, seed, true);
}

Eigen::MatrixXd simulate_serial(const QarfSpec& spec, const PointSet& points, std::size_t replicates,
                                std::uint64_t seed) {
  return simulate_impl(spec, points, replicates, seed, false);
}

EmpiricalCov empirical_covariance(const Eigen::MatrixXd& samples, std::size_t i, std::size_t j) {
  const auto n = samples.rows();
  if (n < 2) throw ParameterError("empirical covariance: at least 2 replicates required");
  if (i >= static_cast<std::size_t>(samples.cols()) || j >= static_cast<std::size_t>(samples.cols())) {
    throw DomainError("empirical covariance: point index out of range");
  }
  const Eigen::ArrayXd p = samples.col(static_cast<Eigen::Index>(i)).array() * samples.col(static_cast<Eigen::Index>(j)).array();
  const double mean = p.mean();
  const double var = (p - mean).square().sum() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

namespace {

// Highest even column of Wynn's epsilon table.
double wynn(std::span<const double> s) {
  std::vector<double> prev(s.size() + 1, 0.0), cur(s.begin(), s.end());
  double best = cur.back();
  for (std::size_t col = 1; col < s.size(); ++col) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0 || !std::isfinite(d)) return best;
      next[i] = prev[i + 1] + 1.0 / d;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0) {
      if (!std::isfinite(cur.back())) return best;
      best = cur.back();
    }
  }
  return best;
}

}  // namespace

double cosine_transform(const std::function<double(double)>& c, double omega) {
  omega = std::abs(omega);
  if (omega == 0.0) {
    QuadOptions o;
    o.rel_tol = 1e-10;
    const auto r = integrate_semi_infinite(c, o);
    if (!r.converged) throw NumericError("cosine transform at 0: quadrature did not converge");
    return r.value / std::numbers::pi;
  }
  const double half = std::numbers::pi / omega;
  auto f = [&](double h) { return std::cos(omega * h) * c(h); };
  QuadOptions o;
  o.rel_tol = 1e-12;
  o.max_intervals = 200;
  const auto p0 = integrate(f, 0.0, 0.5 * half, o);
  o.abs_tol = 1e-15 * std::abs(p0.value);
  std::vector<double> sums{p0.value};
  double prev_est = std::numeric_limits<double>::quiet_NaN();
  int stable = 0, quiet = 0;
  constexpr std::size_t kWindow = 21;
  constexpr int kMaxPanels = 20000;
  for (int k = 1; k <= kMaxPanels; ++k) {
    const double a = (k - 0.5) * half;
    const double term = integrate(f, a, a + half, o).value;
    sums.push_back(sums.back() + term);
    const double s = sums.back();
    quiet = std::abs(term) <= 1e-16 * std::abs(s) ? quiet + 1 : 0;
    if (quiet >= 2 || term == 0.0) return s / std::numbers::pi;
    if (sums.size() < 7) continue;
    const std::size_t m = std::min(kWindow, sums.size());
    const double est = wynn(std::span<const double>(sums).last(m));
    const double tol = 1e-10 * std::abs(est) + 1e-16 * std::abs(p0.value);
    stable = std::abs(est - prev_est) <= tol ? stable + 1 : 0;
    if (stable >= 2) return est / std::numbers::pi;
    prev_est = est;
  }
  std::ostringstream os;
  os << "cosine transform at omega = " << omega << ": no convergence after " << kMaxPanels << " panels";
  throw NumericError(os.str());
}

std::vector<double> spectral_density_1d(const ExponentFunction& nu, double r, std::span<const double> omega_grid) {
  require_positive(r, "spectral density: r");
  std::vector<double> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (!(w >= 0.0)) throw DomainError("spectral density: frequencies must be >= 0");
    out.push_back(cosine_transform([&](double h) { return std::exp(-r * nu(h)); }, w));
  }
  return out;
}

namespace {

struct Bands {
  std::vector<double> nodes, weights;  // flattened (band, node)
};

Bands moment_bands() {
  Bands b;
  double lo = 0.0;
  for (int j = 0; j <= kMomentBands; ++j) {
    const double hi = std::ldexp(1.0, j);
    for (const auto& q : kronrod15_nodes(lo, hi)) {
      b.nodes.push_back(q.x);
      b.weights.push_back(q.w);
    }
    lo = hi;
  }
  return b;
}

std::vector<double> density_at(const std::function<double(double)>& c, const std::vector<double>& w, bool parallel) {
  std::vector<double> out(w.size());
  if (!parallel) {
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = cosine_transform(c, w[i]);
    return out;
  }
  configured_threads();
  FirstError err;
  const long n = static_cast<long>(w.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = cosine_transform(c, w[static_cast<std::size_t>(i)]);
    } catch (...) {
      err.capture(i);
    }
  }
  err.rethrow();
  return out;
}

MomentVerdict classify(const Bands& bands, const std::vector<double>& dens, int k) {
  MomentVerdict v;
  v.k = k;
  double acc = 0.0;
  for (int j = 0; j <= kMomentBands; ++j) {
    double band = 0.0;
    for (int q = 0; q < 15; ++q) {
      const std::size_t i = static_cast<std::size_t>(j * 15 + q);
      band += bands.weights[i] * std::pow(bands.nodes[i], 2 * k) * dens[i];
    }
    acc += 2.0 * band;  // symmetric density
    v.partial_sums.push_back(acc);
  }
  const auto& p = v.partial_sums;
  const std::size_t J = p.size() - 1;
  auto ratio = [&](std::size_t j) {
    const double prev = p[j - 1] - p[j - 2];
    return prev == 0.0 ? 0.0 : (p[j] - p[j - 1]) / prev;
  };
  const double r1 = ratio(J - 1), r2 = ratio(J);
  v.last_ratio = r2;
  v.finite = !(std::min(r1, r2) >= kDivergenceRatio);
  if (v.finite) {
    const double rho = std::clamp(r2, 0.0, 0.99);
    v.value = p[J] + (p[J] - p[J - 1]) * rho / (1.0 - rho);
  } else {
    v.value = std::numeric_limits<double>::infinity();
  }
  return v;
}

std::vector<double> probe_points(const MixingMeasure& m) {
  if (m.atomic()) {
    std::vector<double> r;
    for (const auto& [x, w] : m.atoms()) {
      if (x > 0.0) r.push_back(x);
    }
    return r;
  }
  const double mean = m.kind() == MixingMeasure::Kind::gamma ? m.shape() / m.rate() : 1.0;
  return {0.25 * mean, mean, 4.0 * mean};
}

MsDiffReport ms_impl(const QarfSpec& spec, std::size_t coordinate, int k_max, bool parallel) {
  spec.validate();
  if (coordinate >= spec.blocks()) throw ParameterError("ms_diff_order: coordinate out of range");
  if (spec.block_dim(coordinate) != 1) throw ParameterError("ms_diff_order: coordinate block must be one-dimensional");
  if (k_max < 0) throw ParameterError("ms_diff_order: k_max >= 0 required");
  const ExponentFunction& nu = spec.exponents[coordinate];
  const MixingMeasure& f = spec.independent.empty() ? spec.measure : spec.independent[coordinate];
  double others = 1.0;
  if (!spec.independent.empty()) {
    for (std::size_t b = 0; b < spec.blocks(); ++b) {
      if (b != coordinate) others *= spec.independent[b].total_mass();
    }
  }
  const double scale = spec.variance * others;

  const Bands bands = moment_bands();
  MsDiffReport rep;
  rep.coordinate = coordinate;
  const auto dens = density_at([&](double h) { return scale * f.laplace(nu(h)); }, bands.nodes, parallel);
  for (int k = 0; k <= k_max; ++k) rep.moments.push_back(classify(bands, dens, k));
  for (const auto& m : rep.moments) {
    if (!m.finite) break;
    rep.differentiable_order = m.k;
  }
  for (double r : probe_points(f)) {
    const auto d = density_at([&](double h) { return std::exp(-r * nu(h)); }, bands.nodes, parallel);
    ChiProbe pr;
    pr.r = r;
    for (int k = 0; k <= k_max; ++k) {
      pr.finite.push_back(classify(bands, d, k).finite);
      if (rep.moments[static_cast<std::size_t>(k)].finite && !pr.finite.back()) rep.probe_finite = false;
    }
    rep.probe.push_back(std::move(pr));
  }
  return rep;
}

}  // namespace

MsDiffReport ms_diff_order(const QarfSpec& spec, std::size_t coordinate, int k_max) {
  return ms_impl(spec, coordinate, k_max, true);
}

MsDiffReport ms_diff_order_serial(const QarfSpec& spec, std::size_t coordinate, int k_max) {
  return ms_impl(spec, coordinate, k_max, false);
}

}  // namespace qam
