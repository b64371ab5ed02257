#include "qam/permissibility.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"
#include "qam/random.hpp"

namespace qam {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

double eval_finite(const ScalarFn& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite value " << v << " at t = " << t;
    throw NumericError(os.str());
  }
  return v;
}

// Sum of c_k f(t + offset_k h) and the matching sum of |c_k f|.
DerivativeEstimate stencil(const ScalarFn& f, double t, int n, double h, bool central) {
  double sum = 0.0, mag = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double c = binom(n, k) * (((central ? k : n - k) % 2) ? -1.0 : 1.0);
    const double x = central ? t + (0.5 * n - k) * h : t + k * h;
    const double v = c * eval_finite(f, x);
    sum += v;
    mag += std::abs(v);
  }
  const double hn = std::pow(h, n);
  return {sum / hn, 64.0 * kEps * mag / hn};
}

void validate_order(int max_order, int limit) {
  if (max_order < 1 || max_order > limit) {
    std::ostringstream os;
    os << "derivative order must be in [1, " << limit << "], got " << max_order;
    throw ParameterError(os.str());
  }
}

struct MarginTracker {
  CheckReport& rep;
  void add(double margin, std::vector<double> location, double value, int order) {
    if (margin < rep.worst_margin) rep.worst_margin = margin;
    if (margin < -rep.tolerance && rep.passed) {
      rep.passed = false;
      Witness w;
      w.location = std::move(location);
      w.value = value;
      w.order = order;
      rep.witness = std::move(w);
    }
  }
};

CheckReport new_report(std::string name) {
  CheckReport r;
  r.check = std::move(name);
  r.worst_margin = std::numeric_limits<double>::infinity();
  return r;
}

// Sign checks (-1)^{n - shift} f^(n) >= 0 for n in [first, last].
void sign_checks(const ScalarFn& f, std::span<const double> grid, int first, int last, int shift,
                 bool relative_to_derivative, MarginTracker& tr) {
  for (double t : grid) {
    if (!(t > 0.0)) throw DomainError("derivative checks need a positive grid");
    const double ft = eval_finite(f, t);
    double scale = std::abs(ft);
    if (relative_to_derivative) scale = std::abs(estimate_derivative(f, t, 1).value);
    for (int n = first; n <= last; ++n) {
      const DerivativeEstimate d = n == 0 ? DerivativeEstimate{ft, 0.0} : estimate_derivative(f, t, n);
      const double signed_value = ((n - shift) % 2 ? -1.0 : 1.0) * d.value;
      const double tol = std::max({1e-6 * scale, d.noise, kTiny});
      tr.add(signed_value / tol, {t}, signed_value, n);
    }
  }
}

// Drops the grid tail where the child has decayed smoothly into underflow
// (e^{-t} past t ~ 460); an abrupt exact zero is kept so it can fail.
std::vector<double> underflow_trimmed(const Kernel& child, const std::vector<double>& grid) {
  const double c0 = std::abs(child.radial(0.0));
  const double floor = 1e-200 * (std::isfinite(c0) && c0 > 0.0 ? c0 : 1.0);
  std::vector<double> out;
  double prev = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double v = std::abs(child.radial(t));
    if (v <= floor) {
      if (v == 0.0 && prev > floor) out.push_back(t);
      break;
    }
    out.push_back(t);
    prev = v;
  }
  return out;
}

}  // namespace

double central_difference(const ScalarFn& f, double t, int order, double step) {
  return stencil(f, t, order, step, true).value;
}

DerivativeEstimate estimate_derivative(const ScalarFn& f, double t, int order) {
  if (order == 0) return {eval_finite(f, t), 0.0};
  validate_order(order, kMaxDerivativeOrder + 1);
  const double h = 1e-2 * std::max(t, 1.0);
  if (t >= 1.0 && t - order * h > 0.0) {
    const DerivativeEstimate d1 = stencil(f, t, order, h, true);
    const DerivativeEstimate d2 = stencil(f, t, order, 2.0 * h, true);
    // Extrapolate only in the asymptotic regime; a raw central difference is a
    // positive average of f^(n) and keeps its sign, the extrapolant may not.
    if (std::abs(d1.value - d2.value) <= 0.25 * std::abs(d1.value)) {
      return {(4.0 * d1.value - d2.value) / 3.0, (4.0 * d1.noise + d2.noise) / 3.0};
    }
    return d1;
  }
  if (t - 0.5 * order * h > 0.0) return stencil(f, t, order, h, true);
  return stencil(f, t, order, h, false);
}

CheckReport check_completely_monotone(const ScalarFn& f, std::span<const double> grid, int max_order) {
  validate_order(max_order, kMaxDerivativeOrder);
  CheckReport rep = new_report("completely_monotone");
  rep.max_order_checked = max_order;
  MarginTracker tr{rep};
  sign_checks(f, grid, 0, max_order, 0, false, tr);
  return rep;
}

CheckReport check_bernstein(const ScalarFn& f, std::span<const double> grid, int max_order) {
  validate_order(max_order, kMaxDerivativeOrder);
  CheckReport rep = new_report("bernstein");
  rep.max_order_checked = max_order;
  MarginTracker tr{rep};
  sign_checks(f, grid, 0, 0, 0, false, tr);
  sign_checks(f, grid, 1, max_order + 1, 1, true, tr);
  return rep;
}

CheckReport check_concave_increasing(const ScalarFn& f, std::span<const double> grid) {
  std::vector<double> t(grid.begin(), grid.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  if (t.size() < 3) throw ParameterError("concave check: at least 3 distinct grid points required");
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = eval_finite(f, t[i]);

  CheckReport rep = new_report("concave_increasing");
  rep.max_order_checked = 2;
  MarginTracker tr{rep};
  const std::size_t m = t.size() - 1;
  std::vector<double> slope(m), noise(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dt = t[i + 1] - t[i];
    slope[i] = (v[i + 1] - v[i]) / dt;
    noise[i] = 64.0 * kEps * (std::abs(v[i]) + std::abs(v[i + 1])) / dt;
    const double tol = std::max({noise[i], 1e-9 * std::abs(slope[i]), kTiny});
    tr.add(slope[i] / tol, {t[i], t[i + 1]}, slope[i], 1);
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double drop = slope[i] - slope[i + 1];
    const double tol =
        std::max({noise[i] + noise[i + 1], 1e-9 * (std::abs(slope[i]) + std::abs(slope[i + 1])), kTiny});
    tr.add(drop / tol, {t[i], t[i + 1], t[i + 2]}, -drop, 2);
  }
  return rep;
}

CheckReport check_variogram_cnd(const LagFn& gamma, std::size_t dim, const CndOptions& opt) {
  if (opt.points_per_draw < 3) throw ParameterError("cnd check: points_per_draw >= 3 required");
  if (dim == 0) throw ParameterError("cnd check: dimension must be >= 1");
  CheckReport rep = new_report("variogram_cnd");
  const auto n = static_cast<std::size_t>(opt.points_per_draw);
  std::vector<double> x(n * dim), lag(dim);
  Eigen::MatrixXd g(n, n);

  for (int draw = 0; draw < opt.point_draws; ++draw) {
    StreamRng rng(opt.seed, 0xc0d, static_cast<std::uint64_t>(draw));
    const double scale = std::pow(10.0, 2.0 * rng.uniform() - 1.0);
    for (double& c : x) c = scale * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < dim; ++k) lag[k] = x[i * dim + k] - x[j * dim + k];
        const double v = gamma(lag);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "cnd check: non-finite variogram value " << v;
          throw NumericError(os.str());
        }
        g(i, j) = v;
      }
    }
    g = 0.5 * (g + g.transpose()).eval();

    std::vector<Eigen::VectorXd> candidates;
    for (int w = 0; w < opt.weight_vectors; ++w) {
      Eigen::VectorXd a(n);
      for (std::size_t i = 0; i < n; ++i) a(i) = rng.normal();
      candidates.push_back(a);
    }
    // Worst direction on the zero-sum subspace.
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p * g * p);
    candidates.push_back(es.eigenvectors().col(n - 1));

    for (auto& a : candidates) {
      a.array() -= a.mean();
      const double q = a.dot(g * a);
      const double mag = (a.cwiseAbs().asDiagonal() * g.cwiseAbs() * a.cwiseAbs().asDiagonal()).sum();
      const double tol = std::max(1e-10 * mag, kTiny);
      const double margin = -q / tol;
      if (margin < rep.worst_margin) rep.worst_margin = margin;
      if (margin < -rep.tolerance && rep.passed) {
        rep.passed = false;
        Witness wit;
        wit.location = x;
        wit.value = q;
        wit.weights.assign(a.data(), a.data() + a.size());
        rep.witness = std::move(wit);
      }
    }
  }
  return rep;
}

GramReport matrix_psd(const Eigen::MatrixXd& g) {
  GramReport rep;
  rep.n = static_cast<std::size_t>(g.rows());
  if (rep.n == 0) return rep;
  const Eigen::MatrixXd s = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("gram_psd: eigensolver did not converge");
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.max_eigenvalue = es.eigenvalues()(g.rows() - 1);
  rep.psd = rep.min_eigenvalue >= -kPsdRtol * std::max(1.0, rep.max_eigenvalue);
  return rep;
}

GramReport gram_psd(const PairFn& c, const PointSet& points) {
  std::size_t removed = 0;
  const PointSet unique = deduplicate(points, &removed);
  GramReport rep = matrix_psd(gram_matrix(c, unique));
  rep.duplicates_removed = removed;
  return rep;
}

GramReport gram_psd(const Kernel& k, const PointSet& points) {
  if (points.size() > 0 && points.dim() != k.dim()) {
    std::ostringstream os;
    os << "gram_psd: points have dimension " << points.dim() << " but kernel expects " << k.dim();
    throw DomainError(os.str());
  }
  return gram_psd(stationary_pair(k), points);
}

std::string_view to_string(AdmissibilityCase c) {
  switch (c) {
    case AdmissibilityCase::a:
      return "a";
    case AdmissibilityCase::b:
      return "b";
    case AdmissibilityCase::c:
      return "c";
  }
  return "?";
}

CheckReport admissibility(const CompositionSpec& spec, AdmissibilityCase which,
                          const AdmissibilityOptions& options) {
  const Generator& g = spec.generator;
  if (!g.completely_monotone()) {
    throw ParameterError("admissibility: generator " + g.name() + " is not completely monotone");
  }
  spec.validate();
  const std::vector<double> grid = options.grid.empty() ? log_grid(1e-3, 1e3, 64) : options.grid;

  CheckReport total = new_report(std::string("admissibility_") + std::string(to_string(which)));
  for (std::size_t i = 0; i < spec.children.size(); ++i) {
    const Kernel& child = spec.children[i];
    const std::vector<double> child_grid = underflow_trimmed(child, grid);
    CheckReport r;
    try {
      switch (which) {
        case AdmissibilityCase::a: {
          CndOptions cnd = options.cnd;
          cnd.seed = options.cnd.seed + i;
          r = check_variogram_cnd(
              [&](std::span<const double> h) { return g.phi_inv(child.eval(h)); }, child.dim(), cnd);
          break;
        }
        case AdmissibilityCase::b:
          r = check_bernstein([&](double t) { return g.phi_inv(child.radial(t)); }, child_grid,
                              options.max_order);
          break;
        case AdmissibilityCase::c:
          r = check_concave_increasing([&](double t) { return g.phi_inv(child.radial(t)); }, child_grid);
          break;
      }
    } catch (const NumericError&) {
      // e.g. a compactly supported child: phi^-1(0) is infinite past the range
      r = new_report(total.check);
      r.passed = false;
      r.worst_margin = -std::numeric_limits<double>::infinity();
      Witness w;
      w.value = std::numeric_limits<double>::infinity();
      for (double t : child_grid) {
        const double v = g.phi_inv(child.radial(t));
        if (!std::isfinite(v)) {
          w.location = {t};
          w.value = v;
          break;
        }
      }
      r.witness = std::move(w);
    }
    total.max_order_checked = std::max(total.max_order_checked, r.max_order_checked);
    total.worst_margin = std::min(total.worst_margin, r.worst_margin);
    if (!r.passed && total.passed) {
      total.passed = false;
      total.witness = r.witness;
      total.witness->child = static_cast<int>(i);
    }
  }
  return total;
}

}  // namespace qam
