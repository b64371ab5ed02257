#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qam/generators.hpp"
#include "qam/gram.hpp"
#include "qam/mixing.hpp"
#include "qam/quadrature.hpp"

namespace qam {

/// Positive location-dependent parameter: a, a + b|s|^2 or a + b|s|.
struct ScalarField {
  enum class Kind { constant, quadratic, radial };
  Kind kind = Kind::constant;
  double a = 1.0;
  double b = 0.0;

  static ScalarField constant(double a) { return {Kind::constant, a, 0.0}; }
  static ScalarField quadratic(double a, double b) { return {Kind::quadratic, a, b}; }
  static ScalarField radial(double a, double b) { return {Kind::radial, a, b}; }

  /// a > 0, b >= 0.
  void validate(const std::string& what) const;
  [[nodiscard]] double operator()(std::span<const double> s) const;
};

[[nodiscard]] std::string_view to_string(ScalarField::Kind k);

/// Location-dependent symmetric positive definite matrix Sigma(s).
class AnisotropyField {
 public:
  enum class Form { constant_matrix, scalar_identity, diagonal, callable };
  using Fn = std::function<Eigen::MatrixXd(std::span<const double>)>;

  static AnisotropyField constant(Eigen::MatrixXd sigma);
  /// (a + b |s|^2) I_p
  static AnisotropyField scalar(std::size_t p, double a, double b);
  /// diag(a_k + b_k s_k^2)
  static AnisotropyField diagonal(std::vector<double> a, std::vector<double> b);
  /// Library-only; checked at every evaluation.
  static AnisotropyField callable(std::size_t p, Fn fn);

  [[nodiscard]] Form form() const noexcept { return form_; }
  [[nodiscard]] std::size_t dim() const noexcept { return p_; }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  [[nodiscard]] const std::vector<double>& a() const noexcept { return a_; }
  [[nodiscard]] const std::vector<double>& b() const noexcept { return b_; }

  /// Throws DomainError on a dimension mismatch or when Sigma(s) is not
  /// symmetric with smallest eigenvalue >= kMinEigenvalue.
  [[nodiscard]] Eigen::MatrixXd at(std::span<const double> s) const;

  static constexpr double kMinEigenvalue = 1e-12;

 private:
  AnisotropyField() = default;
  Form form_ = Form::constant_matrix;
  std::size_t p_ = 0;
  Eigen::MatrixXd m_;
  std::vector<double> a_, b_;
  Fn fn_;
};

[[nodiscard]] std::string_view to_string(AnisotropyField::Form f);

struct SigmaPair {
  Eigen::MatrixXd sigma12;
  double prefactor = 1.0;
  double q = 0.0;
};

/// Sigma12 = (Sigma(s1) + Sigma(s2)) / 2,
/// prefactor = |Sigma(s1)|^{1/4} |Sigma(s2)|^{1/4} / |Sigma12|^{1/2},
/// Q = (s1 - s2)' Sigma12^{-1} (s1 - s2).
[[nodiscard]] SigmaPair sigma_pair(const AnisotropyField& field, std::span<const double> s1,
                                   std::span<const double> s2);

/// g(tau; s): 1, (1 + alpha(s) tau)^{-nu(s)} or exp(-alpha(s) tau / 2).
struct LocalFamily {
  enum class Kind { unit, cauchy, exponential };
  Kind kind = Kind::unit;
  ScalarField alpha;
  ScalarField nu;

  void validate() const;
  [[nodiscard]] double operator()(double tau, std::span<const double> s) const;
};

[[nodiscard]] std::string_view to_string(LocalFamily::Kind k);

struct MixtureSpec {
  MixingMeasure measure = MixingMeasure::lebesgue();
  Generator phi1{GeneratorKind::exp_neg};
  LocalFamily g;
  Generator psi2{GeneratorKind::exp_neg};

  /// phi1 completely monotone, psi2 invertible on (0, 1], positive fields.
  void validate() const;
};

/// prefactor * int phi1(Q tau) Q_psi2(g(tau; s1), g(tau; s2)) dF(tau).
/// Coincident points use phi1(0) when finite and throw DomainError otherwise.
/// Throws NumericError carrying the residual when the quadrature does not
/// reach options.rel_tol.
[[nodiscard]] QuadResult eval_quadrature_detailed(const MixtureSpec& mix, const AnisotropyField& field,
                                                  std::span<const double> s1, std::span<const double> s2,
                                                  const QuadOptions& options = {});
[[nodiscard]] double eval_quadrature(const MixtureSpec& mix, const AnisotropyField& field,
                                     std::span<const double> s1, std::span<const double> s2,
                                     const QuadOptions& options = {});

/// Gram-ready view of eval_quadrature.
[[nodiscard]] PairFn nonstationary_pair(const MixtureSpec& mix, const AnisotropyField& field,
                                        const QuadOptions& options = {});

struct IntegrabilityProbe {
  bool integrable = false;
  double value = 0.0;
  double error = 0.0;
};

/// Numerical probe of tau -> psi2^{-1}(g(tau; s)) against F.
[[nodiscard]] IntegrabilityProbe local_integrability(const MixtureSpec& mix, std::span<const double> s);

/// k alpha(s1)^{-lambda} B(lambda, nu1 + nu2 - lambda) 2F1(nu2, lambda; nu1 + nu2; 1 - alpha2/alpha1),
/// k = prefactor Q^{lambda - 1}. Requires lambda in (0, 1), alpha and nu in (0, pi), Q > 0.
[[nodiscard]] double closed_form_cauchy_2f1(double lambda, const ScalarField& alpha, const ScalarField& nu,
                                            const AnisotropyField& field, std::span<const double> s1,
                                            std::span<const double> s2);

/// 2k abar^{-nu/2} K_nu(2 abar^{1/2}), abar = (alpha1 + alpha2)/2, k = prefactor Q^{nu - 1}.
[[nodiscard]] double closed_form_besselk(double nu, const ScalarField& alpha, const AnisotropyField& field,
                                         std::span<const double> s1, std::span<const double> s2);

}  // namespace qam
