#pragma once

// Special functions behind the subordination formulas: Gamma, the
// Mainardi (M-Wright) density zeta_alpha and its moments, the Mittag-Leffler
// function used as an independent per-mode oracle, and quadrature rules for
// integrals of the form  int_0^inf g(theta) zeta_alpha(theta) dtheta.

#include <optional>
#include <utility>
#include <vector>

#include "fracsob/rational.hpp"

namespace fracsob {

/// Fractional order alpha in (0,1], fractional-power exponent q in (0,1),
/// integrability exponent p in (1,inf). The optional exact fields carry the
/// values as typed when they were given as decimals or fractions.
struct FracOrder {
  double alpha = 0.8;
  double q = 0.25;
  double p = 2.0;
  std::optional<Rational> exact_alpha;
  std::optional<Rational> exact_q;
  std::optional<Rational> exact_p;

  /// Validates the ranges; throws DomainError.
  static FracOrder make(double alpha, double q, double p);
  static FracOrder make(Rational alpha, Rational q, Rational p);
};

/// alpha q < 1 and p alpha (1-q) > 1, in exact arithmetic when the order
/// carries exact values.
struct ExponentConditions {
  double alpha_q = 0.0;
  double p_alpha_one_minus_q = 0.0;
  std::optional<Rational> alpha_q_exact;
  std::optional<Rational> p_alpha_one_minus_q_exact;
  bool alpha_q_ok = false;
  bool p_alpha_one_minus_q_ok = false;
};

ExponentConditions exponent_conditions(const FracOrder& order);

/// Gamma function for x > 0.
double gamma(double x);

/// zeta_alpha(theta) for 0 < alpha < 1, theta > 0, absolute error <= tol.
/// Uses the power series for theta at or below density_switch_point(alpha)
/// and the stable-law integral representation above it.
double mainardi_density(double alpha, double theta, double tol = 1e-14);

/// The two internal representations, exposed for cross-validation.
double mainardi_density_series(double alpha, double theta, double tol = 1e-14);
double mainardi_density_integral(double alpha, double theta, double tol = 1e-14);

/// Calibrated threshold between the series and integral representations.
double density_switch_point(double alpha);

/// Interval around the switch point where both representations are accurate.
std::pair<double, double> density_overlap_window(double alpha);

/// int_0^inf theta^v zeta_alpha(theta) dtheta = Gamma(1+v)/Gamma(1+alpha v), v in [0,1].
double mainardi_moment(double alpha, double v);

/// E_{alpha,beta}(z) for alpha in (0,1], beta > 0, z <= 0, by its power
/// series in extended precision. Throws EvaluationError when cancellation
/// would cost more than the 1e-10 relative accuracy budget.
double mittag_leffler(double alpha, double beta, double z);

/// Nodes/weights for int_0^inf g(theta) zeta_alpha(theta) dtheta. The density
/// values at the nodes are stored alongside so callers never re-evaluate them.
class QuadratureRule {
 public:
  double alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& densities() const noexcept { return densities_; }
  double truncation() const noexcept { return theta_max_; }

  /// |sum w_m zeta(theta_m) - 1|
  double normalization_defect() const noexcept { return normalization_defect_; }

  template <class F>
  double integrate(F&& g) const {
    double s = 0.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m) s += weights_[m] * densities_[m] * g(nodes_[m]);
    return s;
  }

 private:
  friend QuadratureRule theta_quadrature(double alpha, int node_count);

  double alpha_ = 0.0;
  double theta_max_ = 0.0;
  double normalization_defect_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> densities_;
};

/// Composite Gauss-Legendre rule on [0, theta_max] under theta = theta_max s^3.
/// node_count >= 16. Throws ConstructionError if the normalization defect
/// exceeds 1e-8 or the first moment misses 1/Gamma(1+alpha) by more than 1e-6.
QuadratureRule theta_quadrature(double alpha, int node_count = 200);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace fracsob
