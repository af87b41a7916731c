#pragma once

// Discrete fractional calculus on uniformly sampled scalar functions of t
// in [0, a]: fractional integral by product integration, Riemann-Liouville
// and Caputo derivatives built on it, and a Grunwald-Letnikov oracle.

#include <functional>
#include <vector>

namespace fracsob {

/// Uniform grid t_m = m a / M on [0, a], M >= 2.
class TimeGrid {
 public:
  /// Throws DomainError for a <= 0 or M < 2.
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double step() const noexcept { return horizon_ / steps_; }
  double node(int m) const noexcept { return m == steps_ ? horizon_ : m * step(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(steps_) + 1; }
  std::vector<double> nodes() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
};

/// Values of a scalar function at every node of a grid.
class SampledFn {
 public:
  /// Throws DomainError unless values.size() == grid.size().
  SampledFn(TimeGrid grid, std::vector<double> values);

  static SampledFn sample(const TimeGrid& grid, const std::function<double(double)>& f);

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t m) const { return values_[m]; }

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

/// a f + b g on a shared grid.
SampledFn combine(double a, const SampledFn& f, double b, const SampledFn& g);

/// Product-integration weights b_k = h^alpha/Gamma(alpha+1) ((k+1)^alpha - k^alpha),
/// k = 0..count-1: the exact integral of (t_n - s)^{alpha-1}/Gamma(alpha) over
/// the cell [t_{n-k-1}, t_{n-k}].
std::vector<double> frac_integral_weights(double alpha, double h, int count);

/// I^alpha f with the kernel integrated exactly against the left-endpoint
/// piecewise-constant interpolant of f. alpha in (0, 1].
SampledFn frac_integral(const SampledFn& f, double alpha);

/// Caputo derivative I^{1-alpha} f' with f' by second-order differences
/// (central inside, one-sided at the ends). Requires M >= 4.
SampledFn caputo_deriv(const SampledFn& f, double alpha);

/// Riemann-Liouville derivative d/dt I^{1-alpha} f. The value at t = 0 is
/// NaN when f(0) != 0, where the exact derivative blows up. Requires M >= 4.
SampledFn rl_deriv(const SampledFn& f, double alpha);

/// Grunwald-Letnikov sum h^{-alpha} sum_j (-1)^j C(alpha, j) f(t - j h).
SampledFn gl_deriv(const SampledFn& f, double alpha);

}  // namespace fracsob
