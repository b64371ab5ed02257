#pragma once

namespace qam {

/// Modified Bessel function of the second kind K_nu(x), x > 0.
[[nodiscard]] double bessel_k(double nu, double x);

/// Gauss hypergeometric 2F1(a, b; c; z) for real z < 1 (z = 1 when c - a - b > 0).
/// Series for |z| <= 0.5; Pfaff and 1 - z transformations elsewhere.
[[nodiscard]] double gauss_2f1(double a, double b, double c, double z);

/// B(a, b) for a, b > 0.
[[nodiscard]] double beta_fn(double a, double b);

}  // namespace qam
