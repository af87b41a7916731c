#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "fracsob/errors.hpp"
#include "fracsob/specfun.hpp"

using namespace fracsob;

namespace {

// zeta_{1/2}(theta) = exp(-theta^2/4)/sqrt(pi)
double half_order_density(double theta) { return std::exp(-theta * theta / 4.0) / std::sqrt(std::numbers::pi); }

double exp_sinh_integral(auto f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-14);
}

}  // namespace

TEST_CASE("gamma at integers and one half") {
  CHECK(fracsob::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fracsob::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));

  // int_0^inf t^{-1/2} e^{-t} dt, integrated independently
  const double oracle = exp_sinh_integral([](double t) { return std::exp(-t) / std::sqrt(t); });
  CHECK(std::abs(fracsob::gamma(0.5) - oracle) < 1e-10);
  CHECK(std::abs(fracsob::gamma(0.5) - std::sqrt(std::numbers::pi)) < 1e-12 * std::sqrt(std::numbers::pi));
}

TEST_CASE("gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(fracsob::gamma(0.0), DomainError);
  CHECK_THROWS_AS(fracsob::gamma(-1.5), DomainError);
}

TEST_CASE("density at alpha = 1/2 reduces to the Gaussian form") {
  CHECK(std::abs(mainardi_density(0.5, 1.0, 1e-12) - std::exp(-0.25) / std::sqrt(std::numbers::pi)) < 1e-8);
  // summing the series alone to convergence gives the same value
  CHECK(std::abs(mainardi_density_series(0.5, 1.0, 1e-14) - half_order_density(1.0)) < 1e-12);
  for (double theta : {0.1, 0.7, 1.6, 2.5, 4.0, 7.0}) {
    CAPTURE(theta);
    CHECK(std::abs(mainardi_density(0.5, theta) - half_order_density(theta)) < 1e-12);
  }
}

TEST_CASE("density is nonnegative on a log grid") {
  for (double alpha : {0.3, 0.5, 0.6, 0.8, 0.9}) {
    for (int i = 0; i <= 60; ++i) {
      const double theta = std::pow(10.0, -2.0 + 3.0 * i / 60.0);
      CAPTURE(alpha);
      CAPTURE(theta);
      CHECK(mainardi_density(alpha, theta) >= 0.0);
    }
  }
}

TEST_CASE("density representations agree on the overlap window") {
  for (double alpha : {0.1, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    const auto [lo, hi] = density_overlap_window(alpha);
    for (int i = 0; i <= 20; ++i) {
      const double theta = lo + (hi - lo) * i / 20.0;
      CAPTURE(alpha);
      CAPTURE(theta);
      CHECK(std::abs(mainardi_density_series(alpha, theta) - mainardi_density_integral(alpha, theta)) < 1e-7);
    }
  }
}

TEST_CASE("density argument validation") {
  CHECK_THROWS_AS(mainardi_density(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(mainardi_density(0.5, -1.0), DomainError);
  CHECK_THROWS_AS(mainardi_density(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(mainardi_density(0.0, 1.0), DomainError);
}

TEST_CASE("series reports non-convergence with its partial sum") {
  // far outside the series window the terms overflow before converging
  try {
    (void)mainardi_density_series(0.9, 6.0);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("density series") != std::string::npos);
  }
}

TEST_CASE("density integrates to one under an independent quadrature") {
  for (double alpha : {0.3, 0.6, 0.8}) {
    CAPTURE(alpha);
    const double total = exp_sinh_integral([alpha](double t) { return mainardi_density(alpha, t, 1e-15); });
    CHECK(std::abs(total - 1.0) < 1e-8);
  }
}

TEST_CASE("moments") {
  CHECK(mainardi_moment(0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mainardi_moment(0.8, 1.0) == doctest::Approx(1.0 / std::tgamma(1.8)).epsilon(1e-14));

  const auto rule = theta_quadrature(0.8, 200);
  CHECK(std::abs(rule.integrate([](double t) { return t; }) - 1.0 / std::tgamma(1.8)) < 1e-6);

  // Gaussian closed form for alpha = 1/2, integrated independently
  const double oracle = exp_sinh_integral([](double t) { return std::sqrt(t) * half_order_density(t); });
  CHECK(std::abs(mainardi_moment(0.5, 0.5) - std::tgamma(1.5) / std::tgamma(1.25)) < 1e-15);
  CHECK(std::abs(mainardi_moment(0.5, 0.5) - oracle) < 1e-10);

  CHECK_THROWS_AS(mainardi_moment(0.5, 1.5), DomainError);
  CHECK_THROWS_AS(mainardi_moment(0.5, -0.1), DomainError);
}

TEST_CASE("mittag-leffler values") {
  CHECK(std::abs(mittag_leffler(1.0, 1.0, -1.0) - std::exp(-1.0)) < 1e-10 * std::exp(-1.0));
  CHECK(mittag_leffler(0.8, 1.0, 0.0) == 1.0);
  CHECK(mittag_leffler(0.8, 0.8, 0.0) == doctest::Approx(1.0 / std::tgamma(0.8)).epsilon(1e-15));

  // E_{1/2}(-1) = int_0^inf exp(-theta) zeta_{1/2}(theta) dtheta
  const double oracle = exp_sinh_integral([](double t) { return std::exp(-t) * half_order_density(t); });
  CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0) - oracle) < 1e-8);
  // and the erfc closed form
  CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0) - std::exp(1.0) * std::erfc(1.0)) < 1e-10 * std::exp(1.0) * std::erfc(1.0));
  CHECK(std::abs(mittag_leffler(0.5, 1.0, -3.0) - std::exp(9.0) * std::erfc(3.0)) < 1e-10 * std::exp(9.0) * std::erfc(3.0));
}

TEST_CASE("mittag-leffler domain and budget errors") {
  CHECK_THROWS_AS(mittag_leffler(0.8, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(mittag_leffler(1.2, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler(0.8, 0.0, -1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler(0.8, 1.0, -5000.0), EvaluationError);
}

TEST_CASE("theta quadrature contract") {
  const auto rule = theta_quadrature(0.8, 200);
  CHECK(rule.size() == 200);
  CHECK(rule.normalization_defect() <= 1e-8);
  for (std::size_t m = 0; m < rule.size(); ++m) {
    CHECK(rule.nodes()[m] > 0.0);
    CHECK(rule.weights()[m] > 0.0);
    if (m > 0) CHECK(rule.nodes()[m] > rule.nodes()[m - 1]);
  }

  const auto half = theta_quadrature(0.5, 200);
  CHECK(std::abs(half.integrate([](double t) { return t; }) - 1.0 / std::tgamma(1.5)) < 1e-6);

  try {
    (void)theta_quadrature(0.8, 8);
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("minimum") != std::string::npos);
  }
}

TEST_CASE("quadrature properties: normalization, moments, Laplace identity") {
  for (double alpha : {0.3, 0.4, 0.5, 0.6, 0.8, 0.9}) {
    CAPTURE(alpha);
    const auto rule = theta_quadrature(alpha, 200);
    CHECK(rule.normalization_defect() <= 1e-8);
    for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      CAPTURE(v);
      CHECK(std::abs(rule.integrate([v](double t) { return std::pow(t, v); }) - mainardi_moment(alpha, v)) < 1e-6);
    }
    for (int i = 0; i <= 20; ++i) {
      const double x = 5.0 * i / 20.0;
      CAPTURE(x);
      CHECK(std::abs(rule.integrate([x](double t) { return std::exp(-x * t); }) - mittag_leffler(alpha, 1.0, -x)) < 1e-6);
    }
  }
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 10, 11}) {
    const auto [x, w] = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CAPTURE(n);
      CAPTURE(k);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("mittag-leffler fraction recurrence matches the generic series") {
  // a perturbed alpha is no small fraction and goes through lgamma per term
  for (double alpha : {0.3, 0.5, 0.75}) {
    for (double z : {-0.5, -2.0, -5.0}) {
      CAPTURE(alpha);
      CAPTURE(z);
      const double exact = mittag_leffler(alpha, 1.0, z);
      const double generic = mittag_leffler(alpha * (1.0 + 1e-13), 1.0, z);
      CHECK(std::abs(exact - generic) < 1e-9 * std::abs(exact));
    }
  }
}
