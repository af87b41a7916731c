#pragma once

// Mild solutions of
//   D^alpha [L u(t)] = E u(t) + f(t, W(t)) + int_0^t sum_j u_j(s) ds,
// with the nonlocal initial condition carried by h(u) = sum_eta c_eta u(t_eta):
//   (P u)(t) = S(t) L M^{-1} [v0 + 1/Gamma(1-alpha) int_0^t (t-s)^{-alpha} (u0 + h(u)) ds]
//            + int_0^t (t-s)^{alpha-1} T(t-s) [f(s, W(s)) + int_0^s sum_j u_j] ds,
// solved by Picard iteration u <- P u on a uniform time grid.

#include <optional>
#include <string>
#include <vector>

#include "fracsob/controls.hpp"
#include "fracsob/fracops.hpp"
#include "fracsob/solution_ops.hpp"
#include "fracsob/spectral.hpp"
#include "fracsob/specfun.hpp"

namespace fracsob {

/// f(t, W) built from W = (B_1 u, ..., B_r u).
struct Nonlinearity {
  enum class Kind { zero, sine_of_slope };
  Kind kind = Kind::zero;
  /// f = gain * sin(d^order u/dx^order) for sine_of_slope.
  double gain = 0.0;
  int order = 1;
  int r_max = 2;

  static Nonlinearity zero() { return {}; }
  static Nonlinearity sine_of_slope(double gain, int order = 1, int r_max = 2);

  /// a_f with ||f(t, W)|| <= a_f (1 + r ||u||_q).
  double growth_constant() const;
  /// Declared L with ||f(u) - f(v)|| <= L ||u - v||_q on `modes` modes.
  double lipschitz_budget(int modes, double q) const;
  std::string describe() const;
};

struct NonlocalTerm {
  double c = 0.0;
  double t = 0.0;
};

struct ProblemSpec {
  FracOrder order;
  double horizon = 1.0;
  int modes = 16;
  int steps = 512;
  SpectralField u0;
  SpectralField v0;
  std::vector<NonlocalTerm> nonlocal;
  Nonlinearity nonlinearity;
  int controls = 0;
  int control_modes = 4;

  TimeGrid grid() const { return {horizon, steps}; }

  /// Structural checks (ranges, ordering of t_eta, field sizes); throws DomainError.
  void validate() const;
  /// alpha q < 1, and p alpha (1-q) > 1 when controls are present; throws
  /// RejectedInstance.
  void check_exponents() const;
};

/// u(t_m, .) for every node of a time grid.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::vector<SpectralField> fields);
  static Trajectory constant(const TimeGrid& grid, const SpectralField& u);

  const TimeGrid& grid() const noexcept { return grid_; }
  int modes() const noexcept { return fields_.front().modes(); }
  const std::vector<SpectralField>& fields() const noexcept { return fields_; }
  const SpectralField& operator[](std::size_t m) const { return fields_[m]; }
  SpectralField& operator[](std::size_t m) { return fields_[m]; }

  /// Piecewise-linear interpolation in t.
  SpectralField at(double t) const;
  /// max_m ||u(t_m)||_q.
  double sup_q_norm(double q) const;

 private:
  TimeGrid grid_;
  std::vector<SpectralField> fields_;
};

/// max_m ||a(t_m) - b(t_m)||_q.
double sup_q_distance(const Trajectory& a, const Trajectory& b, double q);

/// t_eta moved to the nearest grid node.
struct SnappedTerm {
  double c = 0.0;
  double requested = 0.0;
  int node = 0;
  bool moved = false;
};

std::vector<SnappedTerm> snap_nonlocal(const ProblemSpec& spec);

/// f(t, W(t)) projected onto spec.modes modes.
SpectralField eval_f(const ProblemSpec& spec, double t, const SpectralField& u, const CollocationGrid& grid);
SpectralField eval_f(const ProblemSpec& spec, double t, const SpectralField& u);

/// v0 + t^{1-alpha}/Gamma(2-alpha) (u0 + sum_eta c_eta u(t_eta)) at node m:
/// the (t-s)^{-alpha} integral of the constant u0 + h(u), taken exactly.
SpectralField nonlocal_bracket(const ProblemSpec& spec, const Trajectory& u, int m);

/// Control forcing int_0^t (t-s)^{alpha-1} T(t-s) int_0^s sum_j u_j at every
/// node. The inner integral of the piecewise-constant controls is exact.
Trajectory control_forcing(const ProblemSpec& spec, const SolutionOperatorCache& cache, const ControlBundle& controls);

/// One application of P. `forcing` is the precomputed control_forcing term.
Trajectory apply_P(const ProblemSpec& spec, const SolutionOperatorCache& cache, const Trajectory& u,
                   const Trajectory* forcing = nullptr);
Trajectory apply_P(const ProblemSpec& spec, const SolutionOperatorCache& cache, const Trajectory& u,
                   const ControlBundle& controls);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

struct SolveReport {
  int iterations = 0;
  /// sup_m ||u^{k+1}(t_m) - u^k(t_m)||_q per application of P.
  std::vector<double> residuals;
  bool converged = false;
  /// Ratio of the last two nonzero residuals.
  double contraction_ratio = 0.0;
  std::vector<SnappedTerm> snapped;
  std::vector<std::string> warnings;
};

struct Solution {
  Trajectory trajectory;
  SolveReport report;
};

/// Picard iteration from `initial` (default: S(t) L M^{-1} v0 at every node).
/// Throws RejectedInstance for failed exponent conditions and NonConvergence
/// carrying the residual history when max_iter is exhausted.
Solution picard_solve(const ProblemSpec& spec, const SolutionOperatorCache& cache, const ControlBundle* controls = nullptr,
                      SolveOptions options = {}, const Trajectory* initial = nullptr);

}  // namespace fracsob
