#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracsob/errors.hpp"
#include "fracsob/mild_solver.hpp"
#include "fracsob/random.hpp"

using namespace fracsob;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField parabola(int modes) {
  return project([](double x) { return x * (pi - x); }, modes);
}

ProblemSpec base_spec(int modes = 16, int steps = 64) {
  ProblemSpec spec;
  spec.order = FracOrder::make(Rational(4, 5), Rational(1, 4), Rational(2, 1));
  spec.horizon = 1.0;
  spec.modes = modes;
  spec.steps = steps;
  spec.u0 = SpectralField::zero(modes);
  spec.v0 = SpectralField::zero(modes);
  return spec;
}

ProblemSpec nonlinear_spec(int modes = 16, int steps = 64) {
  auto spec = base_spec(modes, steps);
  spec.u0 = parabola(modes);
  spec.v0 = SpectralField::basis(1, modes);
  spec.nonlocal = {{0.3, 0.5}};
  spec.nonlinearity = Nonlinearity::sine_of_slope(0.1);
  return spec;
}

SolutionOperatorCache cache_for(const ProblemSpec& spec) {
  return SolutionOperatorCache(spec.order, spec.modes, spec.grid());
}

SpectralField random_field(int modes, std::mt19937_64& rng, double scale = 1.0) {
  SpectralField u = SpectralField::zero(modes);
  for (double& c : u.coeffs()) c = uniform(rng, -scale, scale);
  return u;
}

}  // namespace

TEST_CASE("zero data gives the zero trajectory") {
  const auto spec = base_spec();
  const auto cache = cache_for(spec);
  const auto out = apply_P(spec, cache, Trajectory::constant(spec.grid(), SpectralField::zero(16)));
  for (const auto& f : out.fields()) CHECK(f.norm() == 0.0);
}

TEST_CASE("eval_f") {
  auto spec = base_spec();
  std::mt19937_64 rng(3);
  const auto u = random_field(16, rng);
  CHECK(eval_f(spec, 0.3, u).norm() == 0.0);
  spec.nonlinearity = Nonlinearity::sine_of_slope(0.1);
  CHECK(eval_f(spec, 0.3, SpectralField::zero(16)).norm() == 0.0);
  CHECK(eval_f(spec, 0.3, u).norm() > 0.0);
}

TEST_CASE("growth bound on random fields") {
  auto spec = base_spec();
  spec.nonlinearity = Nonlinearity::sine_of_slope(0.1);
  const double af = spec.nonlinearity.growth_constant();
  const CollocationGrid grid(16);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_field(16, rng, 5.0);
    CHECK(eval_f(spec, 0.0, u, grid).norm() <= af * (1.0 + 1.0 * q_norm(u, 0.25)));
  }
}

TEST_CASE("nonlocal bracket closed forms") {
  auto spec = base_spec();
  const auto traj = Trajectory::constant(spec.grid(), SpectralField::basis(2, 16));
  spec.v0 = SpectralField::basis(3, 16);
  for (int m : {0, 7, 64}) {
    const auto b = nonlocal_bracket(spec, traj, m);
    CHECK((b - spec.v0).norm() <= 1e-15);
  }

  spec.v0 = SpectralField::zero(16);
  spec.u0 = SpectralField::basis(1, 16);
  for (int m : {1, 13, 64}) {
    const double t = spec.grid().node(m);
    const double kappa = std::pow(t, 0.2) / std::tgamma(1.2);
    const auto b = nonlocal_bracket(spec, traj, m);
    CHECK(std::abs(b(1) - kappa) <= 1e-10);
    CHECK(std::abs(b(2)) <= 1e-15);
  }

  spec.u0 = SpectralField::zero(16);
  spec.nonlocal = {{1.0, 0.5}};
  const double t = spec.grid().node(40);
  const auto b = nonlocal_bracket(spec, traj, 40);
  CHECK(std::abs(b(2) - std::pow(t, 0.2) / std::tgamma(1.2)) <= 1e-10);
}

TEST_CASE("L M^-1 symbol composition on mode one") {
  auto spec = base_spec();
  spec.v0 = SpectralField::basis(1, 16);
  const auto cache = cache_for(spec);
  const auto direct = apply_operator(OperatorKind::L(), apply_operator(OperatorKind::M_inv(), spec.v0));
  CHECK(direct(1) == doctest::Approx(-2.0).epsilon(1e-15));
  const auto out = apply_P(spec, cache, Trajectory::constant(spec.grid(), SpectralField::zero(16)));
  for (int m = 0; m <= spec.steps; ++m) {
    CHECK(std::abs(out[static_cast<std::size_t>(m)](1) + 2.0 * cache.s_at(m, 1)) <= 1e-15);
    CHECK(out[static_cast<std::size_t>(m)](2) == 0.0);
  }
}

TEST_CASE("linear instance") {
  auto spec = base_spec(16, 128);
  spec.v0 = parabola(16);
  const auto cache = cache_for(spec);
  const auto sol = picard_solve(spec, cache);
  CHECK(sol.report.converged);
  CHECK(sol.report.iterations <= 2);
  // per-mode oracle -E_alpha(-lambda t^alpha) v0_n / n^2
  double worst = 0.0;
  for (int m = 0; m <= spec.steps; m += 16) {
    const double t = spec.grid().node(m);
    for (int n = 1; n <= 16; ++n) {
      const double lam = n * n / (1.0 + n * n);
      const double expected = -mittag_leffler(0.8, 1.0, -lam * std::pow(t, 0.8)) * spec.v0(n) / (n * n);
      worst = std::max(worst, std::abs(sol.trajectory[static_cast<std::size_t>(m)](n) - expected));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("linear instance refines between grids") {
  auto errors = [](int steps) {
    auto spec = base_spec(16, steps);
    spec.v0 = parabola(16);
    const auto sol = picard_solve(spec, cache_for(spec));
    double worst = 0.0;
    for (int i = 0; i <= 4096; ++i) {
      const double t = i / 4096.0;
      const auto u = sol.trajectory.at(t);
      for (int n = 1; n <= 16; ++n) {
        const double lam = n * n / (1.0 + n * n);
        const double expected = -mittag_leffler(0.8, 1.0, -lam * std::pow(t, 0.8)) * spec.v0(n) / (n * n);
        worst = std::max(worst, std::abs(u(n) - expected));
      }
    }
    return worst;
  };
  const double coarse = errors(64);
  const double fine = errors(128);
  CAPTURE(coarse);
  CAPTURE(fine);
  CHECK(coarse / fine >= 1.5);
}

TEST_CASE("nonlinear instance converges to a fixed point") {
  const auto spec = nonlinear_spec();
  const auto cache = cache_for(spec);
  const SolveOptions options{1e-10, 200};
  const auto sol = picard_solve(spec, cache, nullptr, options);
  CHECK(sol.report.converged);
  CHECK(sol.report.contraction_ratio < 1.0);
  CHECK(sol.report.warnings.empty());
  const auto& r = sol.report.residuals;
  REQUIRE(r.size() >= 4);
  for (std::size_t k = r.size() - 3; k < r.size(); ++k) CHECK(r[k] < r[k - 1]);
  for (std::size_t k = 2; k < r.size(); ++k) CHECK(r[k] <= r[k - 1]);

  const auto again = apply_P(spec, cache, sol.trajectory);
  CHECK(sup_q_distance(again, sol.trajectory, 0.25) <= 2.0 * options.tol);

  // uniqueness from a distant start
  std::mt19937_64 rng(17);
  const auto start = Trajectory::constant(spec.grid(), random_field(16, rng, 3.0));
  const auto other = picard_solve(spec, cache, nullptr, options, &start);
  CHECK(sup_q_distance(other.trajectory, sol.trajectory, 0.25) <= 2.0 * options.tol);
}

TEST_CASE("continuous dependence on u0") {
  const auto spec = nonlinear_spec();
  const auto cache = cache_for(spec);
  const SolveOptions options{1e-12, 300};
  const auto base = picard_solve(spec, cache, nullptr, options);
  auto diff = [&](double delta) {
    auto perturbed = spec;
    perturbed.u0(1) += delta;
    return sup_q_distance(picard_solve(perturbed, cache, nullptr, options).trajectory, base.trajectory, 0.25);
  };
  const double d1 = diff(1e-3);
  const double d2 = diff(5e-4);
  CHECK(std::isfinite(d1 / 1e-3));
  CHECK(d1 > 0.0);
  CHECK(std::abs(d1 / d2 - 2.0) <= 0.2);
}

TEST_CASE("off-grid nonlocal times are snapped with a warning") {
  auto spec = nonlinear_spec(8, 64);
  spec.nonlocal = {{0.3, 0.501}};
  const auto snapped = snap_nonlocal(spec);
  REQUIRE(snapped.size() == 1);
  CHECK(snapped[0].node == 32);
  CHECK(snapped[0].moved);
  const auto sol = picard_solve(spec, cache_for(spec));
  CHECK(sol.report.warnings.size() == 1);
}

TEST_CASE("validation and rejection") {
  auto spec = nonlinear_spec(8, 32);
  spec.nonlocal = {{-0.3, 0.5}};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec.nonlocal = {{0.3, 0.6}, {0.3, 0.4}};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec.nonlocal = {{0.3, 1.0}};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec.nonlocal = {};
  spec.u0 = SpectralField::zero(9);
  CHECK_THROWS_AS(spec.validate(), DomainError);

  auto controlled = nonlinear_spec(8, 32);
  controlled.order = FracOrder::make(0.9, 0.9, 1.1);
  controlled.controls = 1;
  CHECK_THROWS_AS(controlled.check_exponents(), RejectedInstance);
  CHECK_THROWS_AS(picard_solve(controlled, cache_for(controlled)), RejectedInstance);
  controlled.controls = 0;
  CHECK_NOTHROW(controlled.check_exponents());
}

TEST_CASE("iteration budget exhaustion carries the residuals") {
  const auto spec = nonlinear_spec(8, 32);
  try {
    (void)picard_solve(spec, cache_for(spec), nullptr, SolveOptions{1e-14, 2});
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.residuals().size() == 2);
  }
}

TEST_CASE("control forcing") {
  auto spec = base_spec(8, 32);
  spec.controls = 2;
  const auto cache = cache_for(spec);
  ControlBundle controls(2, spec.grid(), 4);
  CHECK(control_forcing(spec, cache, controls).sup_q_norm(0.25) == 0.0);

  // constant control c on mode 1: G(s) = s c, forcing = c int_0^t (t-s)^{alpha-1} T(t-s) s ds
  for (int i = 0; i < 32; ++i) controls.value(0, i)(1) = 1.0;
  const auto forcing = control_forcing(spec, cache, controls);
  CHECK(forcing[0].norm() == 0.0);
  CHECK(forcing[32](1) > 0.0);
  CHECK(forcing[32](2) == 0.0);
  const auto doubled = [&] {
    ControlBundle c2 = controls;
    auto flat = c2.flatten();
    for (double& v : flat) v *= 2.0;
    c2.assign(flat);
    return control_forcing(spec, cache, c2);
  }();
  CHECK(std::abs(doubled[32](1) - 2.0 * forcing[32](1)) <= 1e-15);

  ControlBundle wrong(1, spec.grid(), 4);
  CHECK_THROWS_AS(control_forcing(spec, cache, wrong), DomainError);
}
