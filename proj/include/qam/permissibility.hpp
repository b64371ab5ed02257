#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qam/compose.hpp"
#include "qam/gram.hpp"
#include "qam/kernel.hpp"
#include "qam/points.hpp"

namespace qam {

using ScalarFn = std::function<double(double)>;
using LagFn = std::function<double(std::span<const double>)>;

struct Witness {
  std::vector<double> location;
  double value = 0.0;
  int order = -1;               // derivative order, when relevant
  std::vector<double> weights;  // CND checks: the refuting weight vector
  int child = -1;               // admissibility: offending child
};

/// Margins are in units of the local tolerance: a sign condition s >= 0 with
/// allowance tol contributes s / tol, so passed == (worst_margin >= -tolerance)
/// with tolerance == 1.
struct CheckReport {
  std::string check;
  bool passed = true;
  int max_order_checked = 0;
  double worst_margin = 0.0;
  double tolerance = 1.0;
  std::optional<Witness> witness;
};

struct GramReport {
  std::size_t n = 0;
  std::size_t duplicates_removed = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool psd = true;
};

inline constexpr double kPsdRtol = 1e-8;
inline constexpr int kMaxDerivativeOrder = 6;

struct DerivativeEstimate {
  double value;
  double noise;  // rounding-error bound of the stencil
};

/// n-th derivative of f at t > 0 by finite differences with step
/// h = 1e-2 max(t, 1): Richardson-refined central differences for t >= 1,
/// plain central differences while the stencil stays in (0, inf), forward
/// differences otherwise.
[[nodiscard]] DerivativeEstimate estimate_derivative(const ScalarFn& f, double t, int order);

/// Central n-th difference with explicit step (exposed for convergence tests).
[[nodiscard]] double central_difference(const ScalarFn& f, double t, int order, double step);

[[nodiscard]] CheckReport check_completely_monotone(const ScalarFn& f, std::span<const double> grid,
                                                    int max_order);
/// f >= 0 and f' completely monotone up to max_order.
[[nodiscard]] CheckReport check_bernstein(const ScalarFn& f, std::span<const double> grid, int max_order);
[[nodiscard]] CheckReport check_concave_increasing(const ScalarFn& f, std::span<const double> grid);

struct CndOptions {
  int point_draws = 20;
  int points_per_draw = 8;
  int weight_vectors = 50;
  std::uint64_t seed = 0;
};

/// Randomized refutation: can fail to refute, never proves.
[[nodiscard]] CheckReport check_variogram_cnd(const LagFn& gamma, std::size_t dim,
                                              const CndOptions& options = {});

[[nodiscard]] GramReport gram_psd(const Kernel& k, const PointSet& points);
[[nodiscard]] GramReport gram_psd(const PairFn& c, const PointSet& points);
/// Eigen-analysis of an assembled matrix (symmetrized first).
[[nodiscard]] GramReport matrix_psd(const Eigen::MatrixXd& g);

enum class AdmissibilityCase { a, b, c };

struct AdmissibilityOptions {
  std::vector<double> grid;  // empty: 64 log-spaced points on [1e-3, 1e3]
  int max_order = 4;
  CndOptions cnd;
};

/// Runs the case-appropriate check on every phi^-1 o C_i (radial profile for
/// cases b and c, full lag for case a). Requires a completely monotone
/// generator (ParameterError otherwise).
[[nodiscard]] CheckReport admissibility(const CompositionSpec& spec, AdmissibilityCase which,
                                        const AdmissibilityOptions& options = {});

[[nodiscard]] std::string_view to_string(AdmissibilityCase c);

}  // namespace qam
