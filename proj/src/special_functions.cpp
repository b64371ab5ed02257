#include "qam/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) < tol; }

bool nonpositive_integer(double x) { return x <= 0.0 && x == std::round(x); }

// Plain power series; fine for |z| well inside the unit disc and, with
// nonnegative terms, all the way up to z -> 1.
double series(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (long k = 0; k < 5'000'000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) <= kEps * std::abs(sum)) {
      // geometric bound on the tail once the term ratio is below one
      const double ratio = std::abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * z);
      if (ratio < 1.0 && std::abs(term) * ratio / (1.0 - ratio) <= 0.5 * kEps * std::abs(sum)) return sum;
    }
  }
  std::ostringstream os;
  os << "gauss_2f1: series did not converge for (" << a << ", " << b << ", " << c << ", " << z << ")";
  throw NumericError(os.str());
}

// 2F1 in terms of 1 - z; requires c - a - b not an integer.
double one_minus_z(double a, double b, double c, double z) {
  const double w = 1.0 - z;
  const double s = c - a - b;
  const double t1 = std::tgamma(c) * std::tgamma(s) / (std::tgamma(c - a) * std::tgamma(c - b));
  const double t2 = std::tgamma(c) * std::tgamma(-s) / (std::tgamma(a) * std::tgamma(b));
  double v = 0.0;
  if (std::isfinite(t1) && t1 != 0.0) v += t1 * series(a, b, 1.0 - s, w);
  if (std::isfinite(t2) && t2 != 0.0) v += t2 * std::pow(w, s) * series(c - a, c - b, 1.0 + s, w);
  return v;
}

// z in [0, 1).
double upper(double a, double b, double c, double z) {
  if (z <= 0.5) return series(a, b, c, z);
  if (!near_integer(c - a - b, 1e-3)) return one_minus_z(a, b, c, z);
  return series(a, b, c, z);
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(nu)) {
    std::ostringstream os;
    os << "bessel_k: x > 0 required, got nu = " << nu << ", x = " << x;
    throw DomainError(os.str());
  }
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  return std::cyl_bessel_k(std::abs(nu), x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    std::ostringstream os;
    os << "beta_fn: a, b > 0 required, got (" << a << ", " << b << ")";
    throw DomainError(os.str());
  }
  return std::beta(a, b);
}

double gauss_2f1(double a, double b, double c, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z)) {
    throw DomainError("gauss_2f1: non-finite argument");
  }
  if (nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a non-positive integer");
  if (z > 1.0) throw DomainError("gauss_2f1: z <= 1 required");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  if (z == 1.0) {
    if (!(c - a - b > 0.0)) throw DomainError("gauss_2f1: at z = 1, c - a - b > 0 required");
    return std::tgamma(c) * std::tgamma(c - a - b) / (std::tgamma(c - a) * std::tgamma(c - b));
  }
  if (z >= -0.5) return upper(a, b, c, z);
  // Pfaff: (1 - z)^{-b} 2F1(c - a, b; c; z / (z - 1)), argument in (1/3, 1)
  const double w = z / (z - 1.0);
  return std::pow(1.0 - z, -b) * upper(c - a, b, c, w);
}

}  // namespace qam
