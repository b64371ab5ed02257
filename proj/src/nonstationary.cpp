#include "qam/nonstationary.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qam/error.hpp"
#include "qam/special_functions.hpp"

namespace qam {
namespace {

double norm2(std::span<const double> s) {
  double r = 0.0;
  for (double v : s) r += v * v;
  return r;
}

void check_dim(std::size_t p, std::span<const double> s) {
  if (s.size() != p) {
    std::ostringstream os;
    os << "anisotropy field: location of dimension " << s.size() << ", field has dimension " << p;
    throw DomainError(os.str());
  }
}

void check_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": matrix is not square");
  if (!m.allFinite()) throw DomainError(std::string(what) + ": matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError(std::string(what) + ": matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < AnisotropyField::kMinEigenvalue) {
    std::ostringstream os;
    os << what << ": smallest eigenvalue " << es.eigenvalues().minCoeff() << " below "
       << AnisotropyField::kMinEigenvalue;
    throw DomainError(os.str());
  }
}

double log_det(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError(std::string("sigma_pair: ") + what + " is singular");
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

// Algebraic decay rate of phi(x) as x -> inf; +inf for exponential or
// compact decay, NaN when unknown.
double generator_decay(const Generator& g) {
  switch (g.kind()) {
    case GeneratorKind::exp_neg:
    case GeneratorKind::gumbel:
    case GeneratorKind::power_series:
    case GeneratorKind::frank:
    case GeneratorKind::truncated_linear:
      return std::numeric_limits<double>::infinity();
    case GeneratorKind::clayton:
      return 1.0 / g.params()[0];
    case GeneratorKind::reciprocal:
      return 1.0;
    case GeneratorKind::power_law:
      return g.params()[0];
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

// phi(x) ~ x^e as x -> 0.
double generator_origin(const Generator& g) {
  switch (g.kind()) {
    case GeneratorKind::reciprocal:
      return -1.0;
    case GeneratorKind::power_law:
      return -g.params()[0];
    default:
      return 0.0;
  }
}

}  // namespace

void ScalarField::validate(const std::string& what) const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError(what + ": a > 0 required");
  if (!(b >= 0.0) || !std::isfinite(b)) throw ParameterError(what + ": b >= 0 required");
}

double ScalarField::operator()(std::span<const double> s) const {
  switch (kind) {
    case Kind::constant:
      return a;
    case Kind::quadratic:
      return a + b * norm2(s);
    case Kind::radial:
      return a + b * std::sqrt(norm2(s));
  }
  return a;
}

std::string_view to_string(ScalarField::Kind k) {
  switch (k) {
    case ScalarField::Kind::constant:
      return "constant";
    case ScalarField::Kind::quadratic:
      return "quadratic";
    case ScalarField::Kind::radial:
      return "radial";
  }
  return "unknown";
}

AnisotropyField AnisotropyField::constant(Eigen::MatrixXd sigma) {
  check_spd(sigma, "anisotropy field");
  AnisotropyField f;
  f.form_ = Form::constant_matrix;
  f.p_ = static_cast<std::size_t>(sigma.rows());
  f.m_ = std::move(sigma);
  return f;
}

AnisotropyField AnisotropyField::scalar(std::size_t p, double a, double b) {
  if (p == 0) throw ParameterError("anisotropy field: dimension >= 1 required");
  ScalarField{ScalarField::Kind::quadratic, a, b}.validate("anisotropy field");
  AnisotropyField f;
  f.form_ = Form::scalar_identity;
  f.p_ = p;
  f.a_ = {a};
  f.b_ = {b};
  return f;
}

AnisotropyField AnisotropyField::diagonal(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || a.size() != b.size()) {
    throw ParameterError("anisotropy field: diagonal a and b must be non-empty and of equal length");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    ScalarField{ScalarField::Kind::quadratic, a[k], b[k]}.validate("anisotropy field diagonal " +
                                                                   std::to_string(k));
  }
  AnisotropyField f;
  f.form_ = Form::diagonal;
  f.p_ = a.size();
  f.a_ = std::move(a);
  f.b_ = std::move(b);
  return f;
}

AnisotropyField AnisotropyField::callable(std::size_t p, Fn fn) {
  if (p == 0) throw ParameterError("anisotropy field: dimension >= 1 required");
  if (!fn) throw ParameterError("anisotropy field: empty callable");
  AnisotropyField f;
  f.form_ = Form::callable;
  f.p_ = p;
  f.fn_ = std::move(fn);
  return f;
}

Eigen::MatrixXd AnisotropyField::at(std::span<const double> s) const {
  check_dim(p_, s);
  switch (form_) {
    case Form::constant_matrix:
      return m_;
    case Form::scalar_identity: {
      const double v = a_[0] + b_[0] * norm2(s);
      return v * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));
    }
    case Form::diagonal: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_), static_cast<Eigen::Index>(p_));
      for (std::size_t k = 0; k < p_; ++k) m(k, k) = a_[k] + b_[k] * s[k] * s[k];
      return m;
    }
    case Form::callable: {
      Eigen::MatrixXd m = fn_(s);
      if (m.rows() != static_cast<Eigen::Index>(p_) || m.cols() != static_cast<Eigen::Index>(p_)) {
        throw DomainError("anisotropy field: callable returned a matrix of the wrong size");
      }
      check_spd(m, "anisotropy field");
      return m;
    }
  }
  return m_;
}

std::string_view to_string(AnisotropyField::Form f) {
  switch (f) {
    case AnisotropyField::Form::constant_matrix:
      return "constant";
    case AnisotropyField::Form::scalar_identity:
      return "scalar";
    case AnisotropyField::Form::diagonal:
      return "diagonal";
    case AnisotropyField::Form::callable:
      return "callable";
  }
  return "unknown";
}

SigmaPair sigma_pair(const AnisotropyField& field, std::span<const double> s1, std::span<const double> s2) {
  const Eigen::MatrixXd m1 = field.at(s1);
  const Eigen::MatrixXd m2 = field.at(s2);
  SigmaPair out;
  out.sigma12 = 0.5 * (m1 + m2);
  Eigen::LLT<Eigen::MatrixXd> llt(out.sigma12);
  if (llt.info() != Eigen::Success) throw NumericError("sigma_pair: Sigma12 is singular");
  const double ld1 = log_det(m1, "Sigma(s1)");
  const double ld2 = log_det(m2, "Sigma(s2)");
  double ld12 = 0.0;
  for (Eigen::Index i = 0; i < out.sigma12.rows(); ++i) ld12 += std::log(llt.matrixLLT()(i, i));
  ld12 *= 2.0;
  out.prefactor = std::exp(0.25 * ld1 + 0.25 * ld2 - 0.5 * ld12);

  Eigen::VectorXd d(static_cast<Eigen::Index>(s1.size()));
  for (std::size_t k = 0; k < s1.size(); ++k) d[static_cast<Eigen::Index>(k)] = s1[k] - s2[k];
  out.q = d.dot(llt.solve(d));
  return out;
}

void LocalFamily::validate() const {
  if (kind == Kind::unit) return;
  alpha.validate("local family alpha");
  if (kind == Kind::cauchy) nu.validate("local family nu");
}

double LocalFamily::operator()(double tau, std::span<const double> s) const {
  switch (kind) {
    case Kind::unit:
      return 1.0;
    case Kind::cauchy:
      return std::exp(-nu(s) * std::log1p(alpha(s) * tau));
    case Kind::exponential:
      return std::exp(-0.5 * alpha(s) * tau);
  }
  return 1.0;
}

std::string_view to_string(LocalFamily::Kind k) {
  switch (k) {
    case LocalFamily::Kind::unit:
      return "unit";
    case LocalFamily::Kind::cauchy:
      return "cauchy";
    case LocalFamily::Kind::exponential:
      return "exponential";
  }
  return "unknown";
}

void MixtureSpec::validate() const {
  if (!phi1.completely_monotone()) {
    throw ParameterError("mixture: phi1 = " + phi1.name() + " is not completely monotone");
  }
  const Interval& dom = psi2.inv_domain();
  if (!dom.contains(1.0) || !dom.contains(0.5)) {
    throw ParameterError("mixture: psi2 = " + psi2.name() + " must be invertible on (0, 1]");
  }
  g.validate();
}

QuadResult eval_quadrature_detailed(const MixtureSpec& mix, const AnisotropyField& field,
                                    std::span<const double> s1, std::span<const double> s2,
                                    const QuadOptions& options) {
  mix.validate();
  const SigmaPair sp = sigma_pair(field, s1, s2);
  const double q = sp.q;
  const bool coincident = q == 0.0;
  if (coincident && !std::isfinite(mix.phi1.phi(0.0))) {
    throw DomainError("nonstationary covariance: phi1(0) = " + mix.phi1.name() +
                      "(0) is infinite, the covariance diverges at coincident locations");
  }
  const bool geometric = mix.psi2.kind() == GeneratorKind::exp_neg;
  const Generator& psi2 = mix.psi2;
  const LocalFamily& g = mix.g;
  auto local = [&](double tau) {
    const double g1 = g(tau, s1), g2 = g(tau, s2);
    if (geometric) return g1 * g2;
    return psi2.phi(psi2.phi_inv(g1) + psi2.phi_inv(g2));
  };
  const double phi0 = coincident ? mix.phi1.phi(0.0) : 0.0;
  auto outer = [&](double tau) { return coincident ? phi0 : mix.phi1.phi(q * tau); };

  QuadResult r;
  if (mix.measure.atomic()) {
    for (const auto& [tau, w] : mix.measure.atoms()) r.value += w * outer(tau) * local(tau);
    r.evaluations = static_cast<int>(mix.measure.atoms().size());
  } else {
    TailHints hints;
    hints.origin_exponent = mix.measure.origin_exponent() + (coincident ? 0.0 : generator_origin(mix.phi1));
    if (!(hints.origin_exponent > -1.0)) {
      throw DomainError("nonstationary covariance: integrand is not integrable at tau = 0 for " +
                        mix.phi1.name() + " against " + mix.measure.name());
    }
    double decay = coincident ? 0.0 : generator_decay(mix.phi1);
    if (mix.measure.exponential_tail() || g.kind == LocalFamily::Kind::exponential) {
      decay = std::numeric_limits<double>::infinity();
    } else if (g.kind == LocalFamily::Kind::cauchy) {
      decay += geometric ? g.nu(s1) + g.nu(s2) : std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isnan(decay) && decay <= 1.0) {
      std::ostringstream os;
      os << "nonstationary covariance: integrand decays like tau^-" << decay << ", not integrable against "
         << mix.measure.name();
      throw DomainError(os.str());
    }
    hints.tail_power = std::isfinite(decay) ? decay : 0.0;
    const MixingMeasure& m = mix.measure;
    r = integrate_semi_infinite([&](double tau) { return outer(tau) * local(tau) * m.density(tau); }, options,
                                hints);
    if (!r.converged || !std::isfinite(r.value)) {
      std::ostringstream os;
      os.precision(6);
      os << "nonstationary covariance: quadrature did not converge (value " << r.value << ", residual estimate "
         << r.error << ", " << r.evaluations << " evaluations)";
      throw NumericError(os.str());
    }
  }
  r.value *= sp.prefactor;
  r.error *= sp.prefactor;
  return r;
}

double eval_quadrature(const MixtureSpec& mix, const AnisotropyField& field, std::span<const double> s1,
                       std::span<const double> s2, const QuadOptions& options) {
  return eval_quadrature_detailed(mix, field, s1, s2, options).value;
}

PairFn nonstationary_pair(const MixtureSpec& mix, const AnisotropyField& field, const QuadOptions& options) {
  mix.validate();
  return [mix, field, options](std::span<const double> a, std::span<const double> b) {
    return eval_quadrature(mix, field, a, b, options);
  };
}

IntegrabilityProbe local_integrability(const MixtureSpec& mix, std::span<const double> s) {
  mix.validate();
  auto h = [&](double tau) { return mix.psi2.phi_inv(mix.g(tau, s)); };
  IntegrabilityProbe p;
  if (mix.measure.atomic()) {
    for (const auto& [tau, w] : mix.measure.atoms()) p.value += w * h(tau);
    p.integrable = std::isfinite(p.value);
    return p;
  }
  TailHints hints;
  hints.origin_exponent = mix.measure.origin_exponent();
  QuadOptions o;
  o.rel_tol = 1e-6;
  o.max_intervals = 500;
  const auto r = integrate_semi_infinite([&](double tau) { return h(tau) * mix.measure.density(tau); }, o, hints);
  p.value = r.value;
  p.error = r.error;
  p.integrable = r.converged && std::isfinite(r.value);
  return p;
}

double closed_form_cauchy_2f1(double lambda, const ScalarField& alpha, const ScalarField& nu,
                              const AnisotropyField& field, std::span<const double> s1,
                              std::span<const double> s2) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("cauchy 2F1 form: lambda in (0, 1) required");
  alpha.validate("cauchy 2F1 form alpha");
  nu.validate("cauchy 2F1 form nu");
  const double a1 = alpha(s1), a2 = alpha(s2), n1 = nu(s1), n2 = nu(s2);
  for (double v : {a1, a2, n1, n2}) {
    if (!(v > 0.0 && v < std::numbers::pi)) {
      std::ostringstream os;
      os << "cauchy 2F1 form: alpha(s), nu(s) in (0, pi) required, got " << v;
      throw DomainError(os.str());
    }
  }
  if (!(n1 + n2 > lambda)) throw DomainError("cauchy 2F1 form: nu(s1) + nu(s2) > lambda required");
  const SigmaPair sp = sigma_pair(field, s1, s2);
  if (!(sp.q > 0.0)) throw DomainError("cauchy 2F1 form: coincident locations (Q = 0)");
  const double k = sp.prefactor * std::pow(sp.q, lambda - 1.0);
  return k * std::pow(a1, -lambda) * beta_fn(lambda, n1 + n2 - lambda) * gauss_2f1(n2, lambda, n1 + n2, 1.0 - a2 / a1);
}

double closed_form_besselk(double nu, const ScalarField& alpha, const AnisotropyField& field,
                           std::span<const double> s1, std::span<const double> s2) {
  if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("bessel form: nu in (0, 1) required");
  alpha.validate("bessel form alpha");
  const double abar = 0.5 * (alpha(s1) + alpha(s2));
  const SigmaPair sp = sigma_pair(field, s1, s2);
  if (!(sp.q > 0.0)) throw DomainError("bessel form: coincident locations (Q = 0)");
  const double k = sp.prefactor * std::pow(sp.q, nu - 1.0);
  return 2.0 * k * std::pow(abar, -0.5 * nu) * bessel_k(nu, 2.0 * std::sqrt(abar));
}

}  // namespace qam
