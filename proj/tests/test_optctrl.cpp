#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracsob/errors.hpp"
#include "fracsob/optctrl.hpp"
#include "fracsob/random.hpp"

using namespace fracsob;

namespace {

ProblemSpec controlled_spec(int modes, int steps, int controls, int control_modes) {
  ProblemSpec spec;
  spec.order = FracOrder::make(Rational(4, 5), Rational(1, 4), Rational(2, 1));
  spec.modes = modes;
  spec.steps = steps;
  spec.u0 = project([](double x) { return x * (std::numbers::pi - x); }, modes);
  spec.v0 = SpectralField::basis(1, modes);
  spec.nonlocal = {{0.3, 0.5}};
  spec.controls = controls;
  spec.control_modes = control_modes;
  return spec;
}

Trajectory random_trajectory(const TimeGrid& grid, int modes, std::mt19937_64& rng) {
  std::vector<SpectralField> fields;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    SpectralField u = SpectralField::zero(modes);
    for (double& c : u.coeffs()) c = uniform(rng, -1.0, 1.0);
    fields.push_back(u);
  }
  return {grid, fields};
}

ControlBundle random_bundle(int count, const TimeGrid& grid, int modes, std::mt19937_64& rng, double scale = 1.0) {
  ControlBundle b(count, grid, modes);
  auto flat = b.flatten();
  for (double& c : flat) c = uniform(rng, -scale, scale);
  b.assign(flat);
  return b;
}

}  // namespace

TEST_CASE("cost of zero data") {
  const TimeGrid grid(1.0, 32);
  const auto traj = Trajectory::constant(grid, SpectralField::zero(8));
  CHECK(cost_J(traj, ControlBundle(2, grid, 4), CostSpec{}) == 0.0);
}

TEST_CASE("cost of a unit constant control") {
  const TimeGrid grid(1.0, 64);
  const auto traj = Trajectory::constant(grid, SpectralField::zero(8));
  ControlBundle c(1, grid, 4);
  for (int i = 0; i < 64; ++i) c.value(0, i)(1) = 1.0;
  CHECK(std::abs(cost_J(traj, c, CostSpec{}) - 0.5) <= 1e-6);
}

TEST_CASE("cost is nonnegative and quadratic") {
  const TimeGrid grid(1.0, 16);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto traj = random_trajectory(grid, 8, rng);
    const auto c = random_bundle(2, grid, 4, rng);
    const double J = cost_J(traj, c, CostSpec{});
    CHECK(J >= 0.0);
    std::vector<SpectralField> doubled;
    for (const auto& f : traj.fields()) doubled.push_back(2.0 * f);
    auto flat = c.flatten();
    for (double& v : flat) v *= 2.0;
    ControlBundle c2 = c;
    c2.assign(flat);
    CHECK(std::abs(cost_J(Trajectory(grid, doubled), c2, CostSpec{}) - 4.0 * J) <= 1e-10 * std::max(1.0, J));
  }
  CHECK_THROWS_AS(cost_J(Trajectory::constant(TimeGrid(1.0, 8), SpectralField::zero(8)), ControlBundle(1, grid, 4), CostSpec{}),
                  DomainError);
  CHECK_THROWS_AS(CostSpec({0.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(CostSpec({-1.0, 1.0}).validate(), DomainError);
}

TEST_CASE("projection onto the admissible ball") {
  const TimeGrid grid(1.0, 16);
  std::mt19937_64 rng(4);
  const auto small = random_bundle(2, grid, 4, rng, 0.01);
  REQUIRE(small.admissibility() <= 1.0);
  CHECK(project_admissible(small).flatten() == small.flatten());

  auto big = random_bundle(2, grid, 4, rng);
  auto flat = big.flatten();
  const double scale = 2.0 / big.admissibility();
  for (double& v : flat) v *= scale;
  big.assign(flat);
  REQUIRE(std::abs(big.admissibility() - 2.0) <= 1e-12);
  const auto p = project_admissible(big);
  CHECK(std::abs(p.admissibility() - 1.0) <= 1e-10);
  const auto pf = p.flatten();
  for (std::size_t k = 0; k < flat.size(); ++k) CHECK(std::abs(pf[k] - 0.5 * flat[k]) <= 1e-12);
  const auto pp = project_admissible(p).flatten();
  for (std::size_t k = 0; k < pf.size(); ++k) CHECK(std::abs(pp[k] - pf[k]) <= 1e-12);

  for (int s = 0; s < 20; ++s) CHECK(sample_admissible(2, grid, 4, 1.0, static_cast<std::uint64_t>(s)).admissibility() <= 1.0);
}

TEST_CASE("pure control penalty is minimized by zero") {
  const auto spec = controlled_spec(4, 16, 1, 2);
  const SolutionOperatorCache cache(spec.order, spec.modes, spec.grid());
  const auto init = sample_admissible(1, spec.grid(), 2, 1.0, 3);
  OptimizeOptions options;
  options.stationarity_tol = 1e-9;
  const auto result = optimize_controls(spec, cache, CostSpec{0.0, 1.0}, init, options);
  CHECK(result.converged);
  for (double c : result.controls.flatten()) CHECK(std::abs(c) <= 1e-6);
}

TEST_CASE("descent on a small controlled instance") {
  const auto spec = controlled_spec(4, 16, 2, 2);
  const SolutionOperatorCache cache(spec.order, spec.modes, spec.grid());
  const CostSpec cost;
  const auto result = optimize_controls(spec, cache, cost, sample_admissible(2, spec.grid(), 2, 1.0, 8));
  CHECK(result.converged);
  CHECK_FALSE(result.budget_exhausted);
  for (std::size_t k = 1; k < result.descent.size(); ++k) CHECK(result.descent[k].J <= result.descent[k - 1].J);
  CHECK(result.controls.admissibility() <= 1.0 + 1e-10);
  CHECK(result.stationarity <= 1e-4);
  CHECK(result.J == doctest::Approx(cost_J(result.trajectory, result.controls, cost)).epsilon(1e-14));
  for (int s = 0; s < 20; ++s) {
    const auto sample = sample_admissible(2, spec.grid(), 2, 1.0, 100 + static_cast<std::uint64_t>(s));
    CHECK(result.J <= evaluate_cost(spec, cache, cost, sample, OptimizeOptions{}.solve));
  }
}

TEST_CASE("optimizer errors") {
  auto spec = controlled_spec(4, 16, 1, 2);
  const SolutionOperatorCache cache(spec.order, spec.modes, spec.grid());
  OptimizeOptions options;
  options.solve.max_iter = 1;
  try {
    (void)optimize_controls(spec, cache, CostSpec{}, ControlBundle(1, spec.grid(), 2), options);
    FAIL("expected OptimizationError");
  } catch (const OptimizationError& e) {
    CHECK(std::string(e.what()).find("initial bundle") != std::string::npos);
  }

  auto rejected = spec;
  rejected.order = FracOrder::make(0.9, 0.9, 1.1);
  const SolutionOperatorCache other(rejected.order, rejected.modes, rejected.grid());
  CHECK_THROWS_AS(optimize_controls(rejected, other, CostSpec{}, ControlBundle(1, spec.grid(), 2)), RejectedInstance);
  CHECK_THROWS_AS(optimize_controls(spec, cache, CostSpec{}, ControlBundle(2, spec.grid(), 2)), DomainError);
}

TEST_CASE("hypothesis check on the reference parameters") {
  auto spec = controlled_spec(16, 32, 2, 4);
  spec.nonlinearity = Nonlinearity::sine_of_slope(0.1);
  const auto report = hypothesis_check(spec);
  REQUIRE(report.exponents.alpha_q_exact.has_value());
  CHECK(*report.exponents.alpha_q_exact == Rational(1, 5));
  CHECK(*report.exponents.p_alpha_one_minus_q_exact == Rational(6, 5));
  CHECK(report.exponents.alpha_q_ok);
  CHECK(report.exponents.p_alpha_one_minus_q_ok);
  CHECK(report.growth_ok);
  CHECK(report.lipschitz_ok);
  CHECK(report.passed(true));
  CHECK(std::abs(report.k1 - 0.3) <= 1e-12);
  CHECK(std::abs(report.k2 - 0.3 * report.probe_sup_q) <= 1e-12);
}

TEST_CASE("hypothesis check reports a failed exponent") {
  auto spec = controlled_spec(8, 16, 1, 4);
  spec.order = FracOrder::make(0.9, 0.9, 1.1);
  const auto report = hypothesis_check(spec);
  CHECK(std::abs(report.exponents.alpha_q - 0.81) <= 1e-12);
  CHECK(report.exponents.alpha_q_ok);
  CHECK(std::abs(report.exponents.p_alpha_one_minus_q - 0.099) <= 1e-12);
  CHECK_FALSE(report.exponents.p_alpha_one_minus_q_ok);
  CHECK_FALSE(report.passed(true));
  CHECK(report.passed(false));
}
