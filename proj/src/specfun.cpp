#include "fracsob/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fracsob/errors.hpp"

namespace fracsob {

namespace {

constexpr int kSeriesTermCap = 500;
constexpr int kSmallTermsToStop = 3;

void require_density_order(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("density order alpha must lie in (0,1), got " + std::to_string(alpha));
  }
}

void require_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("theta must be positive and finite, got " + std::to_string(theta));
  }
}

// log U(phi) for the stable-law kernel
//   U(phi) = (sin(alpha phi)/sin phi)^{1/(1-alpha)} sin((1-alpha) phi)/sin(alpha phi)
double log_stable_kernel(double alpha, double phi) {
  const double sa = std::sin(alpha * phi);
  const double s = std::sin(phi);
  const double sb = std::sin((1.0 - alpha) * phi);
  return (std::log(sa) - std::log(s)) / (1.0 - alpha) + std::log(sb) - std::log(sa);
}

}  // namespace

FracOrder FracOrder::make(double alpha, double q, double p) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha out of (0,1]: " + std::to_string(alpha));
  }
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q out of (0,1): " + std::to_string(q));
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p out of (1,inf): " + std::to_string(p));
  FracOrder order;
  order.alpha = alpha;
  order.q = q;
  order.p = p;
  return order;
}

FracOrder FracOrder::make(Rational alpha, Rational q, Rational p) {
  FracOrder order = make(alpha.value(), q.value(), p.value());
  order.exact_alpha = alpha;
  order.exact_q = q;
  order.exact_p = p;
  return order;
}

ExponentConditions exponent_conditions(const FracOrder& order) {
  ExponentConditions c;
  c.alpha_q = order.alpha * order.q;
  c.p_alpha_one_minus_q = order.p * order.alpha * (1.0 - order.q);
  if (order.exact_alpha && order.exact_q && order.exact_p) {
    const Rational one(1, 1);
    c.alpha_q_exact = *order.exact_alpha * *order.exact_q;
    c.p_alpha_one_minus_q_exact = *order.exact_p * *order.exact_alpha * (one - *order.exact_q);
    c.alpha_q = c.alpha_q_exact->value();
    c.p_alpha_one_minus_q = c.p_alpha_one_minus_q_exact->value();
    c.alpha_q_ok = *c.alpha_q_exact < one;
    c.p_alpha_one_minus_q_ok = one < *c.p_alpha_one_minus_q_exact;
  } else {
    c.alpha_q_ok = c.alpha_q < 1.0;
    c.p_alpha_one_minus_q_ok = c.p_alpha_one_minus_q > 1.0;
  }
  return c;
}

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive, got " + std::to_string(x));
  return std::tgamma(x);
}

double mainardi_density_series(double alpha, double theta, double tol) {
  require_density_order(alpha);
  require_theta(theta);
  // zeta(theta) = (1/pi) sum_{n>=1} (-theta)^{n-1} Gamma(alpha n) sin(pi alpha n) / (n-1)!
  const double log_theta = std::log(theta);
  double sum = 0.0;
  int small = 0;
  for (int n = 1; n <= kSeriesTermCap; ++n) {
    const double log_mag = std::lgamma(alpha * n) - std::lgamma(static_cast<double>(n)) + (n - 1) * log_theta;
    if (log_mag > 700.0) {
      throw EvaluationError("density series overflow at term " + std::to_string(n), sum / std::numbers::pi);
    }
    const double mag = std::exp(log_mag);
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    sum += sign * mag * std::sin(std::numbers::pi * alpha * n);
    if (mag / std::numbers::pi < tol / 10.0) {
      if (++small >= kSmallTermsToStop) return std::max(sum / std::numbers::pi, 0.0);
    } else {
      small = 0;
    }
  }
  throw EvaluationError("density series did not converge within " + std::to_string(kSeriesTermCap) +
                            " terms (alpha=" + std::to_string(alpha) + ", theta=" + std::to_string(theta) + ")",
                        sum / std::numbers::pi);
}

double mainardi_density_integral(double alpha, double theta, double tol) {
  require_density_order(alpha);
  require_theta(theta);
  const double scale = std::pow(theta, 1.0 / (1.0 - alpha));
  const double log_prefactor = (alpha / (1.0 - alpha)) * std::log(theta) - std::log(std::numbers::pi * (1.0 - alpha));
  auto integrand = [&](double phi) {
    if (phi <= 0.0 || phi >= std::numbers::pi) return 0.0;
    const double log_u = log_stable_kernel(alpha, phi);
    const double u = std::exp(log_u);
    const double e = log_u - scale * u + log_prefactor;
    return e < -745.0 ? 0.0 : std::exp(e);
  };
  // U is increasing on (0, pi); once scale*U(0) >= 1 the integrand peaks at 0
  const double log_u0 = (alpha / (1.0 - alpha)) * std::log(alpha) + std::log(1.0 - alpha);
  const double u0 = std::exp(log_u0);
  if (scale * u0 >= 1.0 && log_u0 - scale * u0 + log_prefactor + std::log(std::numbers::pi) < -700.0) return 0.0;

  // split at the peak of the integrand, where scale*U(phi) = 1
  std::vector<double> cuts{0.0};
  if (scale * u0 < 1.0) {
    double lo = 0.0;
    double hi = std::numbers::pi;
    const double target = -std::log(scale);
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      (log_stable_kernel(alpha, mid) < target ? lo : hi) = mid;
    }
    const double peak = 0.5 * (lo + hi);
    // the peak width scales with its distance d to pi
    const double d = std::numbers::pi - peak;
    for (double f : {-8.0, -4.0, -2.0, -1.0, -0.5, -0.2, -0.05, 0.0, 0.05, 0.2, 0.5}) {
      const double c = peak + f * d;
      if (c > cuts.back() + 1e-12) cuts.push_back(c);
    }
  }
  cuts.push_back(std::numbers::pi);

  // error is the summed |Kronrod - Gauss| difference, an upper bound on the
  // Gauss error that overstates the Kronrod result by orders of magnitude
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 15,
                                                                           1e-13, &e);
    error += e;
  }
  if (!std::isfinite(value) || error > std::max(tol, 1e-8 * std::abs(value))) {
    throw EvaluationError("density integral did not reach tolerance (estimate " + [&]{ char b[32]; std::snprintf(b, sizeof b, "%.3g", error); return std::string(b); }() + ")",
                          value);
  }
  return value;
}

double density_switch_point(double alpha) {
  require_density_order(alpha);
  // Largest theta where the alternating series keeps its partial sums below
  // ~10 in magnitude (cancellation loss < 1e-14), measured on alpha in [0.05, 0.97].
  if (alpha <= 0.7) return 1.5;
  if (alpha <= 0.85) return 1.2;
  if (alpha <= 0.95) return 1.0;
  return 0.9;
}

std::pair<double, double> density_overlap_window(double alpha) {
  const double s = density_switch_point(alpha);
  return {0.5 * s, s};
}

double mainardi_density(double alpha, double theta, double tol) {
  require_density_order(alpha);
  require_theta(theta);
  if (theta <= density_switch_point(alpha)) return mainardi_density_series(alpha, theta, tol);
  return mainardi_density_integral(alpha, theta, tol);
}

double mainardi_moment(double alpha, double v) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha out of (0,1]");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("moment order v must lie in [0,1], got " + std::to_string(v));
  return gamma(1.0 + v) / gamma(1.0 + alpha * v);
}

namespace {

struct SeriesOutcome {
  double value = 0.0;
  double cancellation = 0.0;  // max |term| / |sum|
  bool converged = false;
};

// alpha = p/m with a small denominator, if alpha is that fraction to double precision
std::optional<std::pair<int, int>> small_fraction(double alpha) {
  for (int m = 1; m <= 64; ++m) {
    const int p = static_cast<int>(std::lround(alpha * m));
    if (p > 0 && std::abs(static_cast<double>(p) / m - alpha) <= 2.0 * std::numeric_limits<double>::epsilon() * alpha) {
      return std::pair{p, m};
    }
  }
  return std::nullopt;
}

// Power series of E_{alpha,beta}(z), z < 0, in the working precision Real.
// For alpha = p/m the magnitudes follow from the m seeds through
//   Gamma(alpha (k+m) + beta) = Gamma(alpha k + beta) prod_{j<p} (alpha k + beta + j).
template <class Real>
SeriesOutcome mittag_leffler_series(double alpha, double beta, double z) {
  using std::abs;
  using std::exp;
  using std::log;
  using boost::multiprecision::abs;
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  constexpr int kCap = 20000;
  const auto fraction = small_fraction(alpha);
  const Real abs_z(-z);
  const Real log_abs_z = log(abs_z);
  const Real a = fraction ? Real(fraction->first) / Real(fraction->second) : Real(alpha);
  const Real b(beta);
  const Real cutoff = std::numeric_limits<Real>::epsilon() * Real(1e-3);
  const int period = fraction ? fraction->second : 0;
  std::vector<Real> ring(static_cast<std::size_t>(std::max(period, 1)));
  Real z_pow_period = 1;
  for (int j = 0; j < period; ++j) z_pow_period *= abs_z;

  Real sum = 0;
  Real max_term = 0;
  int small = 0;
  for (int k = 0; k < kCap; ++k) {
    Real mag;
    if (period == 0 || k < period) {
      mag = exp(Real(k) * log_abs_z - boost::math::lgamma(a * k + b));
    } else {
      Real& prev = ring[static_cast<std::size_t>(k % period)];
      const Real base = a * (k - period) + b;
      Real denom = 1;
      for (int j = 0; j < fraction->first; ++j) denom *= base + j;
      mag = prev * z_pow_period / denom;
    }
    if (period > 0) ring[static_cast<std::size_t>(k % period)] = mag;
    sum += (k % 2 == 0) ? mag : Real(-mag);
    if (mag > max_term) max_term = mag;
    // terms decrease monotonically once past the peak
    if (mag < max_term && mag < cutoff * abs(sum)) {
      if (++small >= kSmallTermsToStop) {
        const Real ratio = sum == 0 ? Real(std::numeric_limits<double>::infinity()) : Real(max_term / abs(sum));
        return {static_cast<double>(sum), static_cast<double>(ratio), true};
      }
    } else {
      small = 0;
    }
  }
  return {static_cast<double>(sum), std::numeric_limits<double>::infinity(), false};
}

// log10 of the largest series term, located in double precision.
double log10_peak_term(double alpha, double beta, double z) {
  const double lz = std::log(-z);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100000; ++k) {
    const double v = k * lz - std::lgamma(alpha * k + beta);
    if (v < best && k > 2) break;
    best = std::max(best, v);
  }
  return best / std::numbers::ln10;
}

// Largest acceptable cancellation ratio in a type with the given digits,
// keeping 12 significant digits of headroom past the 1e-10 contract.
template <class Real>
double cancellation_budget() {
  return std::pow(10.0, std::numeric_limits<Real>::digits10 - 12);
}

}  // namespace

double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("mittag_leffler: alpha out of (0,1]");
  if (!(beta > 0.0)) throw DomainError("mittag_leffler: beta must be positive");
  if (!(z <= 0.0)) throw DomainError("mittag_leffler: only z <= 0 is supported");
  if (z == 0.0) return 1.0 / gamma(beta);

  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_bin_float_100;
  using float150 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<150>>;
  using float250 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<250>>;

  // Start at the first precision whose budget covers the peak term, then
  // escalate while the measured cancellation exceeds the budget.
  const double peak = log10_peak_term(alpha, beta, z);
  SeriesOutcome r;
  auto attempt = [&]<class Real>(std::type_identity<Real>) {
    if (peak + 4.0 > std::log10(cancellation_budget<Real>())) return false;
    r = mittag_leffler_series<Real>(alpha, beta, z);
    return r.converged && r.cancellation <= cancellation_budget<Real>();
  };
  if (attempt(std::type_identity<long double>{})) return r.value;
  if (attempt(std::type_identity<cpp_bin_float_50>{})) return r.value;
  if (attempt(std::type_identity<cpp_bin_float_100>{})) return r.value;
  if (attempt(std::type_identity<float150>{})) return r.value;
  if (attempt(std::type_identity<float250>{})) return r.value;
  throw EvaluationError("mittag_leffler: series budget exceeded for z=" + std::to_string(z), r.value);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  // P_n(r) and P_{n-1}(r) by the three-term recurrence
  auto legendre = [n](double r) {
    double p0 = 1.0, p1 = r;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, p0};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pn1] = legendre(r);
      dp = n * (r * pn - pn1) / (r * r - 1.0);
      const double dr = pn / dp;
      r -= dr;
      if (std::abs(dr) < 1e-16) break;
    }
    const auto [pn, pn1] = legendre(r);
    dp = n * (r * pn - pn1) / (r * r - 1.0);
    x[i] = -r;
    x[n - 1 - i] = r;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - r * r) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

QuadratureRule theta_quadrature(double alpha, int node_count) {
  require_density_order(alpha);
  if (node_count < 16) {
    throw ConstructionError("theta_quadrature: node_count " + std::to_string(node_count) +
                                " is below the minimum of 16",
                            std::numeric_limits<double>::infinity());
  }
  constexpr double kDensityTol = 1e-15;

  // truncate where the density tail is negligible against theta^2 growth
  double theta_max = 1.0;
  while (mainardi_density(alpha, theta_max, kDensityTol) * theta_max * theta_max > 1e-18) {
    theta_max *= 1.25;
    if (theta_max > 1e4) throw ConstructionError("theta_quadrature: density tail does not decay", theta_max);
  }

  const int panels = std::max(1, node_count / 10);
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> rules;

  QuadratureRule rule;
  rule.alpha_ = alpha;
  rule.theta_max_ = theta_max;
  rule.nodes_.reserve(node_count);
  rule.weights_.reserve(node_count);
  for (int p = 0; p < panels; ++p) {
    const int order = node_count / panels + (p < node_count % panels ? 1 : 0);
    auto it = rules.find(order);
    if (it == rules.end()) it = rules.emplace(order, gauss_legendre(order)).first;
    const auto& [x, w] = it->second;
    const double lo = static_cast<double>(p) / panels;
    const double hi = static_cast<double>(p + 1) / panels;
    for (int i = 0; i < order; ++i) {
      const double s = lo + 0.5 * (x[i] + 1.0) * (hi - lo);
      const double ws = 0.5 * w[i] * (hi - lo);
      rule.nodes_.push_back(theta_max * s * s * s);
      rule.weights_.push_back(ws * 3.0 * theta_max * s * s);
    }
  }
  rule.densities_.reserve(rule.nodes_.size());
  for (double theta : rule.nodes_) rule.densities_.push_back(mainardi_density(alpha, theta, kDensityTol));

  rule.normalization_defect_ = std::abs(rule.integrate([](double) { return 1.0; }) - 1.0);
  const double moment_error = std::abs(rule.integrate([](double t) { return t; }) - mainardi_moment(alpha, 1.0));
  if (rule.normalization_defect_ > 1e-8) {
    throw ConstructionError("theta_quadrature: normalization defect " + std::to_string(rule.normalization_defect_) +
                                " exceeds 1e-8",
                            rule.normalization_defect_);
  }
  if (moment_error > 1e-6) {
    throw ConstructionError("theta_quadrature: first-moment error " + std::to_string(moment_error) + " exceeds 1e-6",
                            rule.normalization_defect_);
  }
  return rule;
}

}  // namespace fracsob
