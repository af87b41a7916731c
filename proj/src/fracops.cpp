#include "fracsob/fracops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fracsob/errors.hpp"
#include "fracsob/specfun.hpp"

namespace fracsob {

namespace {

void require_order(double alpha, bool allow_one) {
  const bool ok = alpha > 0.0 && (allow_one ? alpha <= 1.0 : alpha < 1.0);
  if (!ok) throw DomainError("fractional order out of range: " + std::to_string(alpha));
}

void require_fine_grid(const TimeGrid& grid) {
  if (grid.steps() < 4) {
    throw DomainError("grid too coarse: " + std::to_string(grid.steps()) + " steps, need at least 4");
  }
}

// Second-order derivative of sampled values, one-sided at both ends.
std::vector<double> first_derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  for (std::size_t m = 1; m + 1 < n; ++m) d[m] = (v[m + 1] - v[m - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

}  // namespace

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be positive, got " + std::to_string(horizon));
  }
  if (steps < 2) throw DomainError("time grid needs at least 2 steps, got " + std::to_string(steps));
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(size());
  for (int m = 0; m <= steps_; ++m) t[static_cast<std::size_t>(m)] = node(m);
  return t;
}

SampledFn::SampledFn(TimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DomainError("sampled function has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.size()) + " nodes");
  }
}

SampledFn SampledFn::sample(const TimeGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (int m = 0; m <= grid.steps(); ++m) v[static_cast<std::size_t>(m)] = f(grid.node(m));
  return {grid, std::move(v)};
}

SampledFn combine(double a, const SampledFn& f, double b, const SampledFn& g) {
  if (!(f.grid() == g.grid())) throw DomainError("combine: grids differ");
  std::vector<double> v(f.values().size());
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = a * f[m] + b * g[m];
  return {f.grid(), std::move(v)};
}

std::vector<double> frac_integral_weights(double alpha, double h, int count) {
  require_order(alpha, true);
  std::vector<double> w(static_cast<std::size_t>(std::max(count, 0)));
  const double scale = std::pow(h, alpha) / gamma(alpha + 1.0);
  double prev = 0.0;
  for (int k = 0; k < count; ++k) {
    const double next = std::pow(static_cast<double>(k + 1), alpha);
    w[static_cast<std::size_t>(k)] = scale * (next - prev);
    prev = next;
  }
  return w;
}

SampledFn frac_integral(const SampledFn& f, double alpha) {
  require_order(alpha, true);
  const int steps = f.grid().steps();
  const auto w = frac_integral_weights(alpha, f.grid().step(), steps);
  std::vector<double> out(f.values().size(), 0.0);
  for (int n = 1; n <= steps; ++n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += w[static_cast<std::size_t>(n - 1 - j)] * f[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(n)] = s;
  }
  return {f.grid(), std::move(out)};
}

SampledFn caputo_deriv(const SampledFn& f, double alpha) {
  require_order(alpha, false);
  require_fine_grid(f.grid());
  SampledFn df(f.grid(), first_derivative(f.values(), f.grid().step()));
  return frac_integral(df, 1.0 - alpha);
}

SampledFn rl_deriv(const SampledFn& f, double alpha) {
  require_order(alpha, false);
  require_fine_grid(f.grid());
  const SampledFn inner = frac_integral(f, 1.0 - alpha);
  auto d = first_derivative(inner.values(), f.grid().step());
  if (f[0] != 0.0) d[0] = std::numeric_limits<double>::quiet_NaN();
  return {f.grid(), std::move(d)};
}

SampledFn gl_deriv(const SampledFn& f, double alpha) {
  require_order(alpha, false);
  const std::size_t n = f.values().size();
  std::vector<double> g(n);
  g[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) g[j] = g[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
  const double scale = std::pow(f.grid().step(), -alpha);
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (std::size_t j = 0; j <= m; ++j) s += g[j] * f[m - j];
    out[m] = scale * s;
  }
  return {f.grid(), std::move(out)};
}

}  // namespace fracsob
