#include "fracsob/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracsob/errors.hpp"

namespace fracsob {

namespace {

// Symbol of L M^{-1}: (1+n^2) * (-1/n^2).
double lm_inv_symbol(int n) {
  const double n2 = static_cast<double>(n) * n;
  return -(1.0 + n2) / n2;
}

// Cell integrals of the kernel (t_m - s)^{alpha-1} over [t_{m-k}, t_{m-k+1}],
// k = 1..steps; index 0 unused.
std::vector<double> kernel_weights(double alpha, double h, int steps) {
  std::vector<double> w(static_cast<std::size_t>(steps) + 1, 0.0);
  const double scale = std::pow(h, alpha) / alpha;
  double prev = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double next = std::pow(static_cast<double>(k), alpha);
    w[static_cast<std::size_t>(k)] = scale * (next - prev);
    prev = next;
  }
  return w;
}

// sum_{j<m} K_{m-j} T(t_m - t_j) g_j at every node m, with g piecewise
// constant at left endpoints.
std::vector<SpectralField> convolve_T(const SolutionOperatorCache& cache, const std::vector<SpectralField>& g,
                                      int modes) {
  const TimeGrid& grid = cache.grid();
  const int steps = grid.steps();
  const auto w = kernel_weights(cache.order().alpha, grid.step(), steps);
  // kt[k][n-1] = K_k T_n(t_k)
  std::vector<double> kt((static_cast<std::size_t>(steps) + 1) * static_cast<std::size_t>(modes), 0.0);
  for (int k = 1; k <= steps; ++k) {
    for (int n = 1; n <= modes; ++n) {
      kt[static_cast<std::size_t>(k) * modes + static_cast<std::size_t>(n - 1)] =
          w[static_cast<std::size_t>(k)] * cache.t_at(k, n);
    }
  }
  std::vector<SpectralField> out(static_cast<std::size_t>(steps) + 1, SpectralField::zero(modes));
  for (int m = 1; m <= steps; ++m) {
    auto& o = out[static_cast<std::size_t>(m)].coeffs();
    for (int j = 0; j < m; ++j) {
      const auto& gj = g[static_cast<std::size_t>(j)].coeffs();
      const double* row = &kt[static_cast<std::size_t>(m - j) * modes];
      for (int n = 0; n < modes; ++n) o[static_cast<std::size_t>(n)] += row[n] * gj[static_cast<std::size_t>(n)];
    }
  }
  return out;
}

// u0 + sum_eta c_eta u(t_eta)
SpectralField nonlocal_sum(const ProblemSpec& spec, const std::vector<SnappedTerm>& snapped, const Trajectory& u) {
  SpectralField inner = spec.u0;
  for (const auto& term : snapped) inner += term.c * u[static_cast<std::size_t>(term.node)];
  return inner;
}

// (1/Gamma(1-alpha)) int_0^t (t-s)^{-alpha} ds = t^{1-alpha}/Gamma(2-alpha) at t = t_m
double kappa(const ProblemSpec& spec, int m) {
  const double alpha = spec.order.alpha;
  return alpha == 1.0 ? 1.0 : std::pow(spec.grid().node(m), 1.0 - alpha) / gamma(2.0 - alpha);
}

void require_consistent(const ProblemSpec& spec, const SolutionOperatorCache& cache) {
  if (!(cache.grid() == spec.grid())) throw DomainError("operator cache grid differs from the problem grid");
  if (cache.modes() < spec.modes) throw DomainError("operator cache has fewer modes than the problem");
  if (cache.order().alpha != spec.order.alpha) throw DomainError("operator cache built for a different alpha");
}

}  // namespace

Nonlinearity Nonlinearity::sine_of_slope(double gain, int order, int r_max) {
  Nonlinearity f;
  f.kind = Kind::sine_of_slope;
  f.gain = gain;
  f.order = order;
  f.r_max = r_max;
  return f;
}

double Nonlinearity::growth_constant() const {
  // |gain sin(.)| <= gain pointwise, so ||f|| <= gain sqrt(pi) on L^2(0, pi)
  return kind == Kind::zero ? 0.0 : std::abs(gain) * std::sqrt(std::numbers::pi);
}

double Nonlinearity::lipschitz_budget(int modes, double q) const {
  if (kind == Kind::zero) return 0.0;
  // |sin a - sin b| <= |a - b|, ||d^i w|| <= N^i ||w||, ||w|| <= 2^q ||w||_q
  return std::abs(gain) * std::pow(static_cast<double>(modes), order) * std::pow(2.0, q);
}

std::string Nonlinearity::describe() const {
  if (kind == Kind::zero) return "zero";
  return std::to_string(gain) + " * sin(d^" + std::to_string(order) + " u/dx^" + std::to_string(order) + ")";
}

void ProblemSpec::validate() const {
  (void)FracOrder::make(order.alpha, order.q, order.p);
  (void)grid();
  if (modes < 1) throw DomainError("mode count must be at least 1");
  if (u0.modes() != modes) throw DomainError("u0 has " + std::to_string(u0.modes()) + " modes, expected " + std::to_string(modes));
  if (v0.modes() != modes) throw DomainError("v0 has " + std::to_string(v0.modes()) + " modes, expected " + std::to_string(modes));
  double last = 0.0;
  for (const auto& term : nonlocal) {
    if (!(term.c > 0.0)) throw DomainError("nonlocal coefficient must be positive, got " + std::to_string(term.c));
    if (!(term.t > last && term.t < horizon)) {
      throw DomainError("nonlocal times must be increasing inside (0, a), got " + std::to_string(term.t));
    }
    last = term.t;
  }
  if (nonlinearity.kind != Nonlinearity::Kind::zero) {
    if (nonlinearity.order < 1 || nonlinearity.order > nonlinearity.r_max) {
      throw DomainError("nonlinearity derivative order outside 1..r_max");
    }
    if (!std::isfinite(nonlinearity.gain)) throw DomainError("nonlinearity gain must be finite");
  }
  if (controls < 0) throw DomainError("control count must be nonnegative");
  if (controls > 0 && (control_modes < 1 || control_modes > modes)) {
    throw DomainError("control modes must lie in 1.." + std::to_string(modes));
  }
}

void ProblemSpec::check_exponents() const {
  const auto c = exponent_conditions(order);
  if (!c.alpha_q_ok) throw RejectedInstance("alpha q = " + std::to_string(c.alpha_q) + " is not below 1");
  if (controls > 0 && !c.p_alpha_one_minus_q_ok) {
    throw RejectedInstance("p alpha (1-q) = " + std::to_string(c.p_alpha_one_minus_q) + " is not above 1");
  }
}

Trajectory::Trajectory(TimeGrid grid, std::vector<SpectralField> fields) : grid_(grid), fields_(std::move(fields)) {
  if (fields_.size() != grid_.size()) {
    throw DomainError("trajectory has " + std::to_string(fields_.size()) + " fields for " +
                      std::to_string(grid_.size()) + " nodes");
  }
  for (const auto& f : fields_) {
    if (f.modes() != fields_.front().modes()) throw DomainError("trajectory fields differ in mode count");
  }
}

Trajectory Trajectory::constant(const TimeGrid& grid, const SpectralField& u) {
  return {grid, std::vector<SpectralField>(grid.size(), u)};
}

SpectralField Trajectory::at(double t) const {
  const double h = grid_.step();
  const double clamped = std::clamp(t, 0.0, grid_.horizon());
  const int m = std::min(static_cast<int>(clamped / h), grid_.steps() - 1);
  const double w = (clamped - grid_.node(m)) / h;
  return (1.0 - w) * fields_[static_cast<std::size_t>(m)] + w * fields_[static_cast<std::size_t>(m) + 1];
}

double Trajectory::sup_q_norm(double q) const {
  double s = 0.0;
  for (const auto& f : fields_) s = std::max(s, q_norm(f, q));
  return s;
}

double sup_q_distance(const Trajectory& a, const Trajectory& b, double q) {
  if (!(a.grid() == b.grid())) throw DomainError("trajectories live on different grids");
  if (a.modes() != b.modes()) throw DomainError("trajectories differ in mode count");
  const auto weight = OperatorKind::A_pow(q);
  std::vector<double> w(static_cast<std::size_t>(a.modes()));
  for (int n = 1; n <= a.modes(); ++n) w[static_cast<std::size_t>(n - 1)] = weight.symbol(n);
  double s = 0.0;
  for (std::size_t m = 0; m < a.fields().size(); ++m) {
    const auto& x = a[m].coeffs();
    const auto& y = b[m].coeffs();
    double d = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const double c = w[n] * (x[n] - y[n]);
      d += c * c;
    }
    s = std::max(s, d);
  }
  return std::sqrt(s);
}

std::vector<SnappedTerm> snap_nonlocal(const ProblemSpec& spec) {
  const TimeGrid grid = spec.grid();
  std::vector<SnappedTerm> out;
  for (const auto& term : spec.nonlocal) {
    const int node = static_cast<int>(std::lround(term.t / grid.step()));
    const bool moved = std::abs(grid.node(node) - term.t) > 1e-12 * grid.horizon();
    out.push_back({term.c, term.t, node, moved});
  }
  return out;
}

SpectralField eval_f(const ProblemSpec& spec, double, const SpectralField& u, const CollocationGrid& grid) {
  const auto& nl = spec.nonlinearity;
  if (nl.kind == Nonlinearity::Kind::zero) return SpectralField::zero(spec.modes);
  auto values = apply_Bi(nl.order, u, grid, nl.r_max);
  for (double& v : values) {
    v = nl.gain * std::sin(v);
    if (!std::isfinite(v)) throw EvaluationError("nonlinearity produced a non-finite value", v);
  }
  return project(values, grid);
}

SpectralField eval_f(const ProblemSpec& spec, double t, const SpectralField& u) {
  return eval_f(spec, t, u, CollocationGrid(spec.modes));
}

SpectralField nonlocal_bracket(const ProblemSpec& spec, const Trajectory& u, int m) {
  return spec.v0 + kappa(spec, m) * nonlocal_sum(spec, snap_nonlocal(spec), u);
}

Trajectory control_forcing(const ProblemSpec& spec, const SolutionOperatorCache& cache, const ControlBundle& controls) {
  require_consistent(spec, cache);
  if (controls.count() != spec.controls) {
    throw DomainError("expected " + std::to_string(spec.controls) + " controls, got " + std::to_string(controls.count()));
  }
  if (!(controls.grid() == spec.grid())) throw DomainError("controls live on a different grid");
  if (controls.modes() > spec.modes) throw DomainError("controls have more modes than the state");
  const int steps = spec.steps;
  const double h = spec.grid().step();
  // G(t_i) = int_0^{t_i} sum_j u_j, exact for piecewise-constant controls
  std::vector<SpectralField> g(static_cast<std::size_t>(steps) + 1, SpectralField::zero(spec.modes));
  for (int i = 0; i < steps; ++i) {
    SpectralField next = g[static_cast<std::size_t>(i)];
    for (int j = 0; j < controls.count(); ++j) {
      const auto& c = controls.value(j, i);
      for (int n = 1; n <= c.modes(); ++n) next(n) += h * c(n);
    }
    g[static_cast<std::size_t>(i) + 1] = std::move(next);
  }
  return {spec.grid(), convolve_T(cache, g, spec.modes)};
}

Trajectory apply_P(const ProblemSpec& spec, const SolutionOperatorCache& cache, const Trajectory& u,
                   const Trajectory* forcing) {
  require_consistent(spec, cache);
  if (!(u.grid() == spec.grid()) || u.modes() != spec.modes) throw DomainError("iterate does not match the problem");
  const int steps = spec.steps;
  const int modes = spec.modes;

  std::vector<SpectralField> out;
  if (spec.nonlinearity.kind != Nonlinearity::Kind::zero) {
    std::vector<SpectralField> f(static_cast<std::size_t>(steps) + 1, SpectralField::zero(modes));
    const CollocationGrid grid(modes);
    for (int j = 0; j < steps; ++j) {
      f[static_cast<std::size_t>(j)] = eval_f(spec, spec.grid().node(j), u[static_cast<std::size_t>(j)], grid);
    }
    out = convolve_T(cache, f, modes);
  } else {
    out.assign(static_cast<std::size_t>(steps) + 1, SpectralField::zero(modes));
  }

  const SpectralField inner = nonlocal_sum(spec, snap_nonlocal(spec), u);
  std::vector<double> lm(static_cast<std::size_t>(modes) + 1);
  for (int n = 1; n <= modes; ++n) lm[static_cast<std::size_t>(n)] = lm_inv_symbol(n);
  for (int m = 0; m <= steps; ++m) {
    const double k = kappa(spec, m);
    auto& o = out[static_cast<std::size_t>(m)];
    for (int n = 1; n <= modes; ++n) {
      o(n) += cache.s_at(m, n) * lm[static_cast<std::size_t>(n)] * (spec.v0(n) + k * inner(n));
    }
    if (forcing) o += (*forcing)[static_cast<std::size_t>(m)];
    if (!o.finite()) throw EvaluationError("P produced a non-finite value at node " + std::to_string(m));
  }
  return {spec.grid(), std::move(out)};
}

Trajectory apply_P(const ProblemSpec& spec, const SolutionOperatorCache& cache, const Trajectory& u,
                   const ControlBundle& controls) {
  const Trajectory forcing = control_forcing(spec, cache, controls);
  return apply_P(spec, cache, u, &forcing);
}

Solution picard_solve(const ProblemSpec& spec, const SolutionOperatorCache& cache, const ControlBundle* controls,
                      SolveOptions options, const Trajectory* initial) {
  spec.validate();
  spec.check_exponents();
  require_consistent(spec, cache);

  std::optional<Trajectory> forcing;
  if (controls) forcing = control_forcing(spec, cache, *controls);

  SolveReport report;
  report.snapped = snap_nonlocal(spec);
  for (const auto& s : report.snapped) {
    if (s.moved) {
      report.warnings.push_back("nonlocal time " + std::to_string(s.requested) + " snapped to node " +
                                std::to_string(s.node));
    }
  }

  Trajectory u = [&] {
    if (initial) return *initial;
    std::vector<SpectralField> fields;
    fields.reserve(spec.grid().size());
    for (int m = 0; m <= spec.steps; ++m) {
      SpectralField x = spec.v0;
      for (int n = 1; n <= spec.modes; ++n) x(n) *= cache.s_at(m, n) * lm_inv_symbol(n);
      fields.push_back(std::move(x));
    }
    return Trajectory(spec.grid(), std::move(fields));
  }();

  const double q = spec.order.q;
  for (int k = 0; k < options.max_iter; ++k) {
    Trajectory next = apply_P(spec, cache, u, forcing ? &*forcing : nullptr);
    const double r = sup_q_distance(next, u, q);
    report.residuals.push_back(r);
    report.iterations = k + 1;
    u = std::move(next);
    if (!std::isfinite(r)) throw NonConvergence("Picard iteration diverged", report.residuals);
    if (r <= options.tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) {
    throw NonConvergence("Picard iteration did not reach tol " + std::to_string(options.tol) + " in " +
                             std::to_string(options.max_iter) + " iterations",
                         report.residuals);
  }
  const auto& r = report.residuals;
  if (r.size() >= 2 && r[r.size() - 2] > 0.0) report.contraction_ratio = r.back() / r[r.size() - 2];
  return {std::move(u), std::move(report)};
}

}  // namespace fracsob
