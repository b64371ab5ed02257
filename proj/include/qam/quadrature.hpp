#pragma once

#include <array>
#include <functional>

namespace qam {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
  bool converged = true;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

/// Integrand behaviour used to pick variable changes on [0, inf).
struct TailHints {
  /// f ~ tau^e near 0 (e > -1); negative values trigger tau = v^{1/(1+e)}.
  double origin_exponent = 0.0;
  /// f ~ tau^{-p} as tau -> inf; p > 1 maps [1, inf) algebraically, otherwise
  /// tau = 1 + t/(1-t) is used (fine for exponential decay).
  double tail_power = 0.0;
};

/// 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
[[nodiscard]] QuadResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

struct QuadNode {
  double x;
  double w;
};

/// Kronrod-15 abscissae and weights mapped to [a, b].
[[nodiscard]] std::array<QuadNode, 15> kronrod15_nodes(double a, double b);

/// Globally adaptive bisection on [a, b].
[[nodiscard]] QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                                   const QuadOptions& options = {});

/// Integral over [0, inf), split at 1.
[[nodiscard]] QuadResult integrate_semi_infinite(const std::function<double(double)>& f,
                                                 const QuadOptions& options = {}, const TailHints& hints = {});

}  // namespace qam
