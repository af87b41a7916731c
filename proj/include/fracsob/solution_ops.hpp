#pragma once

// The mild-solution operators
//   S(t) = int_0^inf L^{-1} zeta(theta) Q(t^alpha theta) dtheta,
//   T(t) = alpha int_0^inf L^{-1} theta zeta(theta) Q(t^alpha theta) dtheta,
// which act diagonally on the sine basis. Multipliers are discretized with a
// theta quadrature rule and cached at the nodes of a time grid.

#include <optional>
#include <string>
#include <vector>

#include "fracsob/fracops.hpp"
#include "fracsob/specfun.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

class SolutionOperatorCache {
 public:
  /// alpha = 1 bypasses the quadrature and uses Q(t) L^{-1} for both operators.
  SolutionOperatorCache(FracOrder order, int modes, TimeGrid grid, int node_count = 200);

  const FracOrder& order() const noexcept { return order_; }
  int modes() const noexcept { return modes_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  /// Empty when alpha = 1.
  const std::optional<QuadratureRule>& rule() const noexcept { return rule_; }

  /// Multipliers of S(t) and T(t) on w_n at any t >= 0.
  double s_multiplier(double t, int n) const;
  double t_multiplier(double t, int n) const;

  /// Cached multipliers at grid node m.
  double s_at(int m, int n) const { return s_[index(m, n)]; }
  double t_at(int m, int n) const { return t_[index(m, n)]; }

 private:
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(n - 1);
  }
  void require_mode(int n) const;

  FracOrder order_;
  int modes_;
  TimeGrid grid_;
  std::optional<QuadratureRule> rule_;
  std::vector<double> s_;
  std::vector<double> t_;
};

/// Coefficientwise S(t)u and T(t)u. Throws DomainError if u has more modes
/// than the cache.
SpectralField apply_S(const SolutionOperatorCache& cache, double t, const SpectralField& u);
SpectralField apply_T(const SolutionOperatorCache& cache, double t, const SpectralField& u);

struct ClauseResult {
  std::string clause;
  bool passed = true;
  double worst_margin = 0.0;  // smallest (bound - value)/bound seen
  double worst_t = 0.0;
  int worst_n = 0;
};

struct OperatorBoundsReport {
  BoundConstants bounds;
  std::vector<ClauseResult> clauses;
  /// alpha C1 Mq Gamma(2-q)/Gamma(1+alpha(1-q)).
  double envelope_constant = 0.0;
  /// sup over samples in [1e-3, 1] of ||(-A)^q T(t)|| t^{q alpha}.
  double envelope_measured = 0.0;
  /// least-squares log-log slope of ||(-A)^q T(t)|| on the small-t samples.
  double envelope_slope = 0.0;
};

struct ContinuityProbe {
  double gap = 1e-6;
  double limit = 1e-4;
};

/// Checks boundedness of S and T with C1 M0 and C1 M0/Gamma(alpha) on random
/// fields, strong continuity of the multipliers in t, and the t^{-q alpha}
/// envelope of (-A)^q T(t). Throws PropertyFailure naming the clause, t and n
/// on the first violated clause.
OperatorBoundsReport verify_operator_bounds(const SolutionOperatorCache& cache, const std::vector<double>& t_samples,
                                            int trials, unsigned long long seed, ContinuityProbe probe = {});

}  // namespace fracsob
