#include "fracsob/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>

#include "fracsob/fracops.hpp"
#include "fracsob/optctrl.hpp"
#include "fracsob/solution_ops.hpp"
#include "fracsob/specfun.hpp"

namespace fracsob {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// Runs body, timing it and turning exceptions into a failed result.
CheckResult timed(int id, const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double lambda(int n) { return n * n / (1.0 + n * n); }

}  // namespace

ProblemSpec reference_problem(int modes, int steps) {
  ProblemSpec spec;
  spec.order = FracOrder::make(Rational(4, 5), Rational(1, 4), Rational(2, 1));
  spec.horizon = 1.0;
  spec.modes = modes;
  spec.steps = steps;
  spec.u0 = project([](double x) { return x * (std::numbers::pi - x); }, modes);
  spec.v0 = SpectralField::basis(1, modes);
  spec.nonlocal = {{0.3, 0.5}};
  spec.nonlinearity = Nonlinearity::sine_of_slope(0.1);
  return spec;
}

CheckResult check_density_normalization() {
  return timed(1, "density normalization", [](CheckResult& r) {
    r.limit = 1e-8;
    for (double alpha : {0.3, 0.5, 0.6, 0.8, 0.9}) {
      const auto rule = theta_quadrature(alpha, 200);
      const double defect = std::abs(rule.integrate([](double) { return 1.0; }) - 1.0);
      r.measured = std::max(r.measured, defect);
    }
    r.passed = r.measured <= r.limit;
    r.detail = fmt("max |int zeta - 1| = %.3e over 5 orders, 200 nodes", r.measured);
  });
}

CheckResult check_density_moments() {
  return timed(2, "density moments", [](CheckResult& r) {
    r.limit = 1e-6;
    for (double alpha : {0.4, 0.8}) {
      const auto rule = theta_quadrature(alpha, 200);
      for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double exact = std::tgamma(1.0 + v) / std::tgamma(1.0 + alpha * v);
        const double got = rule.integrate([v](double t) { return std::pow(t, v); });
        r.measured = std::max(r.measured, std::abs(got - exact));
      }
    }
    r.passed = r.measured <= r.limit;
    r.detail = fmt("max moment error %.3e over 10 (alpha, v) pairs", r.measured);
  });
}

CheckResult check_half_order_density() {
  return timed(3, "half-order density closed form", [](CheckResult& r) {
    r.limit = 1e-8;
    for (int i = 0; i < 50; ++i) {
      const double theta = 0.01 + (4.0 - 0.01) * i / 49.0;
      const double exact = std::exp(-theta * theta / 4.0) / std::sqrt(std::numbers::pi);
      r.measured = std::max(r.measured, std::abs(mainardi_density(0.5, theta) - exact));
    }
    r.passed = r.measured <= r.limit;
    r.detail = fmt("max error %.3e on 50 points of [0.01, 4]", r.measured);
  });
}

CheckResult check_operator_oracle() {
  return timed(4, "solution operator oracle", [](CheckResult& r) {
    r.limit = 1e-6;
    for (double alpha : {0.5, 0.8}) {
      const SolutionOperatorCache cache(FracOrder::make(alpha, 0.25, 2.0), 16, TimeGrid(1.0, 31));
      for (int m = 0; m <= 31; ++m) {
        const double t = cache.grid().node(m);
        for (int n = 1; n <= 16; ++n) {
          const double z = -lambda(n) * std::pow(t, alpha);
          const double scale = 1.0 + n * n;
          r.measured = std::max(r.measured, std::abs(cache.s_at(m, n) - mittag_leffler(alpha, 1.0, z) / scale));
          r.measured = std::max(r.measured, std::abs(cache.t_at(m, n) - mittag_leffler(alpha, alpha, z) / scale));
        }
      }
    }
    r.passed = r.measured <= r.limit;
    r.detail = fmt("max multiplier error %.3e, 16 modes x 32 times x 2 orders", r.measured);
  });
}

CheckResult check_operator_bounds(std::uint64_t seed) {
  return timed(5, "operator bounds", [seed](CheckResult& r) {
    const SolutionOperatorCache cache(FracOrder::make(0.8, 0.25, 2.0), 16, TimeGrid(1.0, 32));
    std::vector<double> samples;
    for (int i = 0; i <= 32; ++i) samples.push_back(i / 32.0);
    const auto report = verify_operator_bounds(cache, samples, 1000, seed);
    bool clauses = true;
    for (const auto& c : report.clauses) clauses = clauses && c.passed;
    r.measured = report.envelope_measured;
    r.limit = report.envelope_constant;
    r.passed = clauses && report.bounds.C1 == 0.5 && report.bounds.M0 == 1.0 &&
               std::isfinite(report.envelope_measured) && report.envelope_measured <= report.envelope_constant * (1.0 + 1e-8);
    r.detail = fmt("C1 = %.6g, M0 = %.6g", report.bounds.C1, report.bounds.M0) + ", " +
               fmt("envelope %.6g <= %.6g on [1e-3, 1]", report.envelope_measured, report.envelope_constant) +
               (clauses ? ", all clauses hold" : ", a clause failed");
  });
}

CheckResult check_fractional_identities() {
  return timed(6, "fractional calculus identities", [](CheckResult& r) {
    double caputo = 0.0;
    double rl_const = 0.0;
    double rl_gl = 0.0;
    const TimeGrid grid(1.0, 2000);
    const double c = 2.5;
    const auto constant = SampledFn::sample(grid, [c](double) { return c; });
    for (double alpha : {0.3, 0.5, 0.8}) {
      for (double v : caputo_deriv(constant, alpha).values()) caputo = std::max(caputo, std::abs(v));
      const auto rl = rl_deriv(constant, alpha);
      for (std::size_t m = grid.size() / 4; m < grid.size(); ++m) {
        const double exact = c * std::pow(grid.node(static_cast<int>(m)), -alpha) / std::tgamma(1.0 - alpha);
        rl_const = std::max(rl_const, std::abs(rl[m] - exact) / exact);
      }
      for (auto fn : {+[](double t) { return t * t; }, +[](double t) { return std::exp(t); },
                      +[](double t) { return 1.0 + std::sin(3.0 * t); }}) {
        const auto f = SampledFn::sample(grid, fn);
        const auto gl = gl_deriv(f, alpha);
        const auto rlf = rl_deriv(f, alpha);
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t m = grid.size() / 4; m < grid.size(); ++m) {
          diff = std::max(diff, std::abs(gl[m] - rlf[m]));
          scale = std::max(scale, std::abs(rlf[m]));
        }
        rl_gl = std::max(rl_gl, diff / scale);
      }
    }
    r.measured = std::max(rl_const, rl_gl);
    r.limit = 0.02;
    r.passed = caputo <= 1e-12 && rl_const <= 0.02 && rl_gl <= 0.02;
    r.detail = fmt("caputo of constants %.1e (limit 1e-12), ", caputo) +
               fmt("RL of constant rel %.2e, RL vs GL rel %.2e (limit 0.02)", rl_const, rl_gl);
  });
}

CheckResult check_linear_solve() {
  return timed(7, "linear instance solve", [](CheckResult& r) {
    const int probes = 1 << 14;
    auto base = reference_problem(16, 2);
    base.u0 = SpectralField::zero(16);
    base.v0 = project([](double x) { return x * (std::numbers::pi - x); }, 16);
    base.nonlocal.clear();
    base.nonlinearity = Nonlinearity::zero();
    // per-mode closed form -E_alpha(-lambda_n t^alpha) v0_n / n^2
    std::vector<double> exact(static_cast<std::size_t>(probes + 1) * 16);
    for (int i = 0; i <= probes; ++i) {
      const double t = static_cast<double>(i) / probes;
      for (int n = 1; n <= 16; ++n) {
        exact[static_cast<std::size_t>(i) * 16 + static_cast<std::size_t>(n - 1)] =
            -mittag_leffler(0.8, 1.0, -lambda(n) * std::pow(t, 0.8)) * base.v0(n) / (n * n);
      }
    }
    auto error = [&](int steps, double& nodal, int& iterations) {
      auto spec = base;
      spec.steps = steps;
      const SolutionOperatorCache cache(spec.order, spec.modes, spec.grid());
      const auto sol = picard_solve(spec, cache);
      iterations = sol.report.iterations;
      double worst = 0.0;
      nodal = 0.0;
      for (int i = 0; i <= probes; ++i) {
        const auto u = sol.trajectory.at(static_cast<double>(i) / probes);
        const bool on_node = (i * steps) % probes == 0;
        for (int n = 1; n <= 16; ++n) {
          const double e = std::abs(u(n) - exact[static_cast<std::size_t>(i) * 16 + static_cast<std::size_t>(n - 1)]);
          worst = std::max(worst, e);
          if (on_node) nodal = std::max(nodal, e);
        }
      }
      return worst;
    };
    double nodal_coarse = 0.0;
    double nodal_fine = 0.0;
    int it_coarse = 0;
    int it_fine = 0;
    const double coarse = error(512, nodal_coarse, it_coarse);
    const double fine = error(1024, nodal_fine, it_fine);
    const double ratio = coarse / fine;
    r.measured = fine;
    r.limit = 1e-3;
    r.passed = fine <= 1e-3 && ratio >= 1.5;
    r.detail = fmt("sup error M=1024 %.3e, M=512 %.3e", fine, coarse) + fmt(", ratio %.3f (>= 1.5)", ratio) +
               fmt(", nodal error %.1e / %.1e", nodal_coarse, nodal_fine) +
               fmt(", Picard sweeps %g / %g", it_coarse, it_fine);
  });
}

CheckResult check_nonlinear_solve() {
  return timed(8, "nonlinear reference solve", [](CheckResult& r) {
    const auto spec = reference_problem(16, 512);
    const SolutionOperatorCache cache(spec.order, spec.modes, spec.grid());
    const SolveOptions options{1e-8, 200};
    const auto base = picard_solve(spec, cache, nullptr, options);
    auto shifted = [&](double delta) {
      auto perturbed = spec;
      perturbed.u0(1) += delta;
      return sup_q_distance(picard_solve(perturbed, cache, nullptr, options).trajectory, base.trajectory, spec.order.q);
    };
    const double delta = 1e-3;
    const double d_full = shifted(delta);
    const double d_half = shifted(0.5 * delta);
    const double K = d_full / delta;
    const double linearity = std::abs(d_full / d_half - 2.0) / 2.0;
    const double residual = base.report.residuals.back();
    r.measured = residual;
    r.limit = 1e-8;
    r.passed = base.report.converged && residual <= 1e-8 && base.report.contraction_ratio < 1.0 && std::isfinite(K) &&
               linearity <= 0.1;
    r.detail = fmt("residual %.2e after %g sweeps", residual, base.report.iterations) +
               fmt(", contraction %.3f, K = %.4g", base.report.contraction_ratio, K) +
               fmt(", halving deviation %.2e (limit 0.1)", linearity);
  });
}

CheckResult check_exponent_reproduction() {
  return timed(9, "exponent reproduction", [](CheckResult& r) {
    auto spec = reference_problem(16, 64);
    spec.controls = 2;
    const auto report = hypothesis_check(spec, 100, 0);
    const auto& e = report.exponents;
    const bool exact = e.alpha_q_exact && e.p_alpha_one_minus_q_exact && *e.alpha_q_exact == Rational(1, 5) &&
                       *e.p_alpha_one_minus_q_exact == Rational(6, 5);
    r.measured = e.alpha_q;
    r.limit = 1.0;
    r.passed = exact && e.alpha_q_ok && e.p_alpha_one_minus_q_ok;
    r.detail = "alpha q = " + (e.alpha_q_exact ? e.alpha_q_exact->str() : std::string("?")) + " < 1, p alpha (1-q) = " +
               (e.p_alpha_one_minus_q_exact ? e.p_alpha_one_minus_q_exact->str() : std::string("?")) + " > 1";
  });
}

std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  return {check_density_normalization(), check_density_moments(),  check_half_order_density(),
          check_operator_oracle(),       check_operator_bounds(seed), check_fractional_identities(),
          check_linear_solve(),          check_nonlinear_solve(),   check_exponent_reproduction()};
}

}  // namespace fracsob
