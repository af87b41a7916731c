#pragma once

// Lagrange control problem: minimize
//   J = int_0^a [ w_s ||u(t)||^2 + w_c int_0^t sum_j ||u_j(s)||^2 ds ] dt
// over control bundles in the ball sum_j int_0^a ||u_j|| <= radius.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsob/controls.hpp"
#include "fracsob/mild_solver.hpp"
#include "fracsob/solution_ops.hpp"
#include "fracsob/specfun.hpp"

namespace fracsob {

struct CostSpec {
  double state_weight = 1.0;
  double control_weight = 1.0;

  /// Weights nonnegative and not both zero; throws DomainError.
  void validate() const;
};

/// Trapezoid in t of ||u||^2; the control part is exact for piecewise-constant controls.
double cost_J(const Trajectory& traj, const ControlBundle& controls, const CostSpec& cost);

/// Uniform rescaling onto the admissible ball; identity on admissible input.
ControlBundle project_admissible(const ControlBundle& controls);

/// Bundle with uniform random coefficients, rescaled to a uniform random
/// fraction of the radius.
ControlBundle sample_admissible(int count, const TimeGrid& grid, int modes, double radius, std::uint64_t seed);

struct OptimizeOptions {
  int max_iter = 200;
  double fd_step = 1e-4;
  double armijo = 1e-4;
  int max_halvings = 40;
  /// Stop once ||x - Pi(x - grad J)|| falls below this.
  double stationarity_tol = 1e-6;
  SolveOptions solve{1e-12, 500};
};

struct DescentEntry {
  int iteration = 0;
  double J = 0.0;
  double step = 0.0;
  double stationarity = 0.0;
};

struct OptimizeResult {
  ControlBundle controls;
  Trajectory trajectory;
  double J = 0.0;
  /// Entry 0 is the projected initial bundle; later entries are accepted steps.
  std::vector<DescentEntry> descent;
  double stationarity = 0.0;
  bool converged = false;
  bool budget_exhausted = false;
};

/// Solves the controlled problem for a bundle and returns J.
double evaluate_cost(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                     const ControlBundle& controls, const SolveOptions& solve);

/// Central finite-difference gradient of J in the flattened coefficients.
std::vector<double> fd_gradient(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                                const ControlBundle& controls, const OptimizeOptions& options);

/// ||x - Pi(x - g)||.
double projected_gradient_norm(const ControlBundle& controls, const std::vector<double>& gradient);

/// Projected gradient descent with Barzilai-Borwein trial steps and Armijo
/// halving. Throws RejectedInstance when the exponent conditions fail and
/// OptimizationError when an inner solve diverges.
OptimizeResult optimize_controls(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                                 const ControlBundle& init, const OptimizeOptions& options = {});

struct HypothesisReport {
  ExponentConditions exponents;
  /// a_f and max ||f(u)|| / (1 + r ||u||_q) over the probes.
  double growth_constant = 0.0;
  double growth_measured = 0.0;
  bool growth_ok = true;
  /// Declared budget and max ||f(u) - f(v)|| / ||u - v||_q over probe pairs.
  double lipschitz_budget = 0.0;
  double lipschitz_measured = 0.0;
  bool lipschitz_ok = true;
  /// ||h(u) - h(v)||_q <= k1 sup ||u - v||_q and ||h(u)||_q <= k2.
  double k1 = 0.0;
  double k2 = 0.0;
  double probe_sup_q = 0.0;
  int samples = 0;

  bool passed(bool controlled) const;
};

/// Exponent conditions plus sampled growth, Lipschitz and nonlocal constants.
HypothesisReport hypothesis_check(const ProblemSpec& spec, int samples = 100, std::uint64_t seed = 0);

}  // namespace fracsob
