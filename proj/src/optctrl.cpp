#include "fracsob/optctrl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fracsob/errors.hpp"
#include "fracsob/random.hpp"

namespace fracsob {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

ControlBundle with_values(const ControlBundle& like, const std::vector<double>& flat) {
  ControlBundle out = like;
  out.assign(flat);
  return out;
}

struct Evaluated {
  Trajectory trajectory;
  double J;
};

Evaluated solve_and_cost(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                         const ControlBundle& controls, const SolveOptions& solve, const std::string& label) {
  try {
    auto sol = picard_solve(spec, cache, &controls, solve);
    const double J = cost_J(sol.trajectory, controls, cost);
    return {std::move(sol.trajectory), J};
  } catch (const NonConvergence& e) {
    throw OptimizationError("inner solve diverged for " + label + ": " + e.what());
  } catch (const EvaluationError& e) {
    throw OptimizationError("inner solve failed for " + label + ": " + e.what());
  }
}

}  // namespace

void CostSpec::validate() const {
  if (!(state_weight >= 0.0) || !(control_weight >= 0.0)) throw DomainError("cost weights must be nonnegative");
  if (state_weight == 0.0 && control_weight == 0.0) throw DomainError("cost weights must not both be zero");
}

double cost_J(const Trajectory& traj, const ControlBundle& controls, const CostSpec& cost) {
  cost.validate();
  if (!(traj.grid() == controls.grid())) throw DomainError("trajectory and controls live on different grids");
  const TimeGrid& grid = traj.grid();
  const double h = grid.step();
  const double a = grid.horizon();

  double state = 0.0;
  for (std::size_t m = 0; m < traj.fields().size(); ++m) {
    const double w = (m == 0 || m + 1 == traj.fields().size()) ? 0.5 : 1.0;
    const double n = traj[m].norm();
    state += w * h * n * n;
  }

  // int_0^a int_0^t g(s) ds dt = int_0^a (a - s) g(s) ds; on cell i this is
  // h g_i (a - t_i - h/2) for constant g_i
  double control = 0.0;
  for (int j = 0; j < controls.count(); ++j) {
    for (int i = 0; i < controls.cells(); ++i) {
      const double n = controls.value(j, i).norm();
      control += h * n * n * (a - grid.node(i) - 0.5 * h);
    }
  }
  return cost.state_weight * state + cost.control_weight * control;
}

ControlBundle project_admissible(const ControlBundle& controls) {
  const double value = controls.admissibility();
  if (value <= controls.radius()) return controls;
  auto flat = controls.flatten();
  const double scale = controls.radius() / value;
  for (double& c : flat) c *= scale;
  return with_values(controls, flat);
}

ControlBundle sample_admissible(int count, const TimeGrid& grid, int modes, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ControlBundle out(count, grid, modes, radius);
  auto flat = out.flatten();
  for (double& c : flat) c = uniform(rng, -1.0, 1.0);
  out.assign(flat);
  const double value = out.admissibility();
  if (value > 0.0) {
    const double scale = uniform01(rng) * radius / value;
    for (double& c : flat) c *= scale;
    out.assign(flat);
  }
  return out;
}

double evaluate_cost(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                     const ControlBundle& controls, const SolveOptions& solve) {
  return solve_and_cost(spec, cache, cost, controls, solve, "the given bundle").J;
}

std::vector<double> fd_gradient(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                                const ControlBundle& controls, const OptimizeOptions& options) {
  const double d = options.fd_step;
  auto flat = controls.flatten();
  std::vector<double> g(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double x = flat[k];
    const std::string label = "coefficient " + std::to_string(k);
    flat[k] = x + d;
    const double plus = solve_and_cost(spec, cache, cost, with_values(controls, flat), options.solve, label + " (+)").J;
    flat[k] = x - d;
    const double minus = solve_and_cost(spec, cache, cost, with_values(controls, flat), options.solve, label + " (-)").J;
    flat[k] = x;
    g[k] = (plus - minus) / (2.0 * d);
  }
  return g;
}

double projected_gradient_norm(const ControlBundle& controls, const std::vector<double>& gradient) {
  const auto x = controls.flatten();
  auto y = x;
  for (std::size_t k = 0; k < y.size(); ++k) y[k] -= gradient[k];
  const auto p = project_admissible(with_values(controls, y)).flatten();
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - p[k]) * (x[k] - p[k]);
  return std::sqrt(s);
}

OptimizeResult optimize_controls(const ProblemSpec& spec, const SolutionOperatorCache& cache, const CostSpec& cost,
                                 const ControlBundle& init, const OptimizeOptions& options) {
  spec.validate();
  spec.check_exponents();
  cost.validate();
  if (init.count() != spec.controls) {
    throw DomainError("initial bundle has " + std::to_string(init.count()) + " controls, expected " +
                      std::to_string(spec.controls));
  }

  ControlBundle x = project_admissible(init);
  auto current = solve_and_cost(spec, cache, cost, x, options.solve, "the initial bundle");
  OptimizeResult result{x, current.trajectory, current.J, {}, 0.0, false, false};
  result.descent.push_back({0, current.J, 0.0, 0.0});

  std::vector<double> prev_x;
  std::vector<double> prev_g;
  double step = 1.0;
  for (int it = 1;; ++it) {
    const auto g = fd_gradient(spec, cache, cost, x, options);
    const double stationarity = projected_gradient_norm(x, g);
    result.descent.back().stationarity = stationarity;
    result.stationarity = stationarity;
    if (stationarity <= options.stationarity_tol) {
      result.converged = true;
      break;
    }
    if (it > options.max_iter) {
      result.budget_exhausted = true;
      break;
    }

    const auto xf = x.flatten();
    if (!prev_x.empty()) {
      std::vector<double> s(xf.size());
      std::vector<double> y(xf.size());
      for (std::size_t k = 0; k < xf.size(); ++k) {
        s[k] = xf[k] - prev_x[k];
        y[k] = g[k] - prev_g[k];
      }
      const double sy = dot(s, y);
      if (sy > 0.0) step = dot(s, s) / sy;
    } else {
      step = 1.0 / std::max(norm2(g), 1e-300);
    }

    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, step *= 0.5) {
      auto trial = xf;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= step * g[k];
      ControlBundle candidate = project_admissible(with_values(x, trial));
      const auto cf = candidate.flatten();
      double decrease = 0.0;
      for (std::size_t k = 0; k < cf.size(); ++k) decrease += g[k] * (cf[k] - xf[k]);
      if (!(decrease < 0.0)) continue;
      auto next = solve_and_cost(spec, cache, cost, candidate, options.solve,
                                 "iteration " + std::to_string(it) + " trial step " + std::to_string(step));
      if (next.J <= current.J + options.armijo * decrease) {
        prev_x = xf;
        prev_g = g;
        x = std::move(candidate);
        current = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    result.descent.push_back({it, current.J, step, 0.0});
  }

  result.controls = x;
  result.trajectory = current.trajectory;
  result.J = current.J;
  return result;
}

bool HypothesisReport::passed(bool controlled) const {
  return exponents.alpha_q_ok && (!controlled || exponents.p_alpha_one_minus_q_ok) && growth_ok && lipschitz_ok;
}

HypothesisReport hypothesis_check(const ProblemSpec& spec, int samples, std::uint64_t seed) {
  HypothesisReport report;
  report.exponents = exponent_conditions(spec.order);
  report.samples = samples;
  const auto& nl = spec.nonlinearity;
  const double q = spec.order.q;
  report.growth_constant = nl.growth_constant();
  report.lipschitz_budget = nl.lipschitz_budget(spec.modes, q);

  std::mt19937_64 rng(seed);
  auto random_field = [&](double scale) {
    SpectralField u = SpectralField::zero(spec.modes);
    for (double& c : u.coeffs()) c = uniform(rng, -scale, scale);
    return u;
  };
  const CollocationGrid grid(spec.modes);
  const double r = nl.kind == Nonlinearity::Kind::zero ? 1.0 : nl.r_max;

  for (int s = 0; s < samples; ++s) {
    const auto u = random_field(2.0);
    const auto v = u + random_field(1e-3);
    const auto fu = eval_f(spec, 0.0, u, grid);
    const auto fv = eval_f(spec, 0.0, v, grid);
    report.growth_measured = std::max(report.growth_measured, fu.norm() / (1.0 + r * q_norm(u, q)));
    const double gap = q_norm(u - v, q);
    if (gap > 0.0) report.lipschitz_measured = std::max(report.lipschitz_measured, (fu - fv).norm() / gap);

    // h acts on constant-in-time probes as sum_eta c_eta u
    const double uq = q_norm(u, q);
    report.probe_sup_q = std::max(report.probe_sup_q, uq);
    SpectralField hu = SpectralField::zero(spec.modes);
    SpectralField hv = SpectralField::zero(spec.modes);
    for (const auto& term : spec.nonlocal) {
      hu += term.c * u;
      hv += term.c * v;
    }
    report.k2 = std::max(report.k2, q_norm(hu, q));
    if (gap > 0.0) report.k1 = std::max(report.k1, q_norm(hu - hv, q) / gap);
  }
  if (spec.nonlocal.empty()) report.k1 = 0.0;
  report.growth_ok = report.growth_measured <= report.growth_constant * (1.0 + 1e-12);
  report.lipschitz_ok = report.lipschitz_measured <= report.lipschitz_budget * (1.0 + 1e-12);
  return report;
}

}  // namespace fracsob
