#include "fracsob/solution_ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fracsob/errors.hpp"
#include "fracsob/random.hpp"

namespace fracsob {

namespace {

// The theta rule meets its normalization and first-moment contracts to 1e-8,
// so bounds that hold with equality (t = 0, n = 1) are checked with this slack.
constexpr double kQuadratureSlack = 1e-8;

double mode_lambda(int n) {
  const double n2 = static_cast<double>(n) * n;
  return n2 / (1.0 + n2);
}

double mode_weight(int n) { return 1.0 / (1.0 + static_cast<double>(n) * n); }

std::string at(double t, int n) { return " at t=" + std::to_string(t) + ", n=" + std::to_string(n); }

}  // namespace

SolutionOperatorCache::SolutionOperatorCache(FracOrder order, int modes, TimeGrid grid, int node_count)
    : order_(std::move(order)), modes_(modes), grid_(grid) {
  if (modes < 1) throw DomainError("mode count must be at least 1, got " + std::to_string(modes));
  if (order_.alpha < 1.0) rule_ = theta_quadrature(order_.alpha, node_count);
  const std::size_t count = grid_.size() * static_cast<std::size_t>(modes_);
  s_.resize(count);
  t_.resize(count);
  for (int m = 0; m <= grid_.steps(); ++m) {
    const double t = grid_.node(m);
    for (int n = 1; n <= modes_; ++n) {
      s_[index(m, n)] = s_multiplier(t, n);
      t_[index(m, n)] = t_multiplier(t, n);
    }
  }
}

void SolutionOperatorCache::require_mode(int n) const {
  if (n < 1 || n > modes_) throw DomainError("mode " + std::to_string(n) + " outside 1.." + std::to_string(modes_));
}

double SolutionOperatorCache::s_multiplier(double t, int n) const {
  require_mode(n);
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative, got " + std::to_string(t));
  const double lambda = mode_lambda(n);
  if (!rule_) return mode_weight(n) * std::exp(-lambda * t);
  const double x = lambda * std::pow(t, order_.alpha);
  return mode_weight(n) * rule_->integrate([x](double theta) { return std::exp(-x * theta); });
}

double SolutionOperatorCache::t_multiplier(double t, int n) const {
  require_mode(n);
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative, got " + std::to_string(t));
  const double lambda = mode_lambda(n);
  if (!rule_) return mode_weight(n) * std::exp(-lambda * t);
  const double x = lambda * std::pow(t, order_.alpha);
  return order_.alpha * mode_weight(n) * rule_->integrate([x](double theta) { return theta * std::exp(-x * theta); });
}

SpectralField apply_S(const SolutionOperatorCache& cache, double t, const SpectralField& u) {
  if (u.modes() > cache.modes()) throw DomainError("field has more modes than the operator cache");
  SpectralField out = u;
  for (int n = 1; n <= u.modes(); ++n) out(n) *= cache.s_multiplier(t, n);
  return out;
}

SpectralField apply_T(const SolutionOperatorCache& cache, double t, const SpectralField& u) {
  if (u.modes() > cache.modes()) throw DomainError("field has more modes than the operator cache");
  SpectralField out = u;
  for (int n = 1; n <= u.modes(); ++n) out(n) *= cache.t_multiplier(t, n);
  return out;
}

OperatorBoundsReport verify_operator_bounds(const SolutionOperatorCache& cache, const std::vector<double>& t_samples,
                                            int trials, unsigned long long seed, ContinuityProbe probe) {
  if (t_samples.empty()) throw DomainError("bound verification needs time samples");
  const int modes = cache.modes();
  const double alpha = cache.order().alpha;
  const double q = cache.order().q;

  OperatorBoundsReport report;
  // every mode's (lambda t)^q e^{-lambda t} peaks at t = q/lambda_n <= 2q,
  // so [0, max(2q, samples)] carries the sup over all t > 0
  std::vector<double> span = t_samples;
  span.push_back(0.0);
  span.push_back(2.0 * q);
  report.bounds = measure_bounds(modes, span, q);
  const BoundConstants& b = report.bounds;

  // (a) boundedness on random fields
  {
    ClauseResult s_clause{"(a) ||S(t)u|| <= C1 M0 ||u||", true, 1.0, 0.0, 0};
    ClauseResult t_clause{"(a) ||T(t)u|| <= C1 M0/Gamma(alpha) ||u||", true, 1.0, 0.0, 0};
    const double s_bound = b.C1 * b.M0;
    const double t_bound = b.C1 * b.M0 / gamma(alpha);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < trials; ++k) {
      const double t = t_samples[static_cast<std::size_t>(k) % t_samples.size()];
      SpectralField u = SpectralField::zero(modes);
      for (double& c : u.coeffs()) c = uniform(rng, -1.0, 1.0);
      const double un = u.norm();
      if (un == 0.0) continue;
      const double s_margin = (s_bound - apply_S(cache, t, u).norm() / un) / s_bound;
      const double t_margin = (t_bound - apply_T(cache, t, u).norm() / un) / t_bound;
      if (s_margin < s_clause.worst_margin) s_clause = {s_clause.clause, true, s_margin, t, 0};
      if (t_margin < t_clause.worst_margin) t_clause = {t_clause.clause, true, t_margin, t, 0};
    }
    for (ClauseResult* c : {&s_clause, &t_clause}) {
      c->passed = c->worst_margin >= -kQuadratureSlack;
      if (!c->passed) throw PropertyFailure("clause " + c->clause + " violated" + at(c->worst_t, c->worst_n));
      report.clauses.push_back(*c);
    }
  }

  // (b) strong continuity of the multipliers
  {
    ClauseResult c{"(b) multiplier continuity", true, 1.0, 0.0, 0};
    for (double t : t_samples) {
      for (int n = 1; n <= modes; ++n) {
        const double ds = std::abs(cache.s_multiplier(t + probe.gap, n) - cache.s_multiplier(t, n));
        const double dt = std::abs(cache.t_multiplier(t + probe.gap, n) - cache.t_multiplier(t, n));
        const double margin = (probe.limit - std::max(ds, dt)) / probe.limit;
        if (margin < c.worst_margin) {
          c.worst_margin = margin;
          c.worst_t = t;
          c.worst_n = n;
        }
      }
    }
    c.passed = c.worst_margin >= 0.0;
    if (!c.passed) throw PropertyFailure("clause " + c.clause + " violated" + at(c.worst_t, c.worst_n));
    report.clauses.push_back(c);
  }

  // (d) the t^{-q alpha} envelope of (-A)^q T(t) on a log grid of [1e-3, 1]
  {
    report.envelope_constant =
        alpha * b.C1 * b.Mq * gamma(2.0 - q) / gamma(1.0 + alpha * (1.0 - q));
    ClauseResult c{"(d) ||(-A)^q T(t)|| <= K t^{-q alpha}", true, 1.0, 0.0, 0};
    const auto aq = OperatorKind::A_pow(q);
    constexpr int kPoints = 64;
    std::vector<double> log_t;
    std::vector<double> log_norm;
    for (int i = 0; i < kPoints; ++i) {
      const double t = std::pow(10.0, -3.0 + 3.0 * i / (kPoints - 1));
      double norm = 0.0;
      int arg = 1;
      for (int n = 1; n <= modes; ++n) {
        const double v = aq.symbol(n) * cache.t_multiplier(t, n);
        if (v > norm) {
          norm = v;
          arg = n;
        }
      }
      const double scaled = norm * std::pow(t, q * alpha);
      report.envelope_measured = std::max(report.envelope_measured, scaled);
      const double margin = (report.envelope_constant - scaled) / report.envelope_constant;
      if (margin < c.worst_margin) c = {c.clause, true, margin, t, arg};
      if (t <= 1e-2) {
        log_t.push_back(std::log(t));
        log_norm.push_back(std::log(norm));
      }
    }
    double mt = 0.0;
    double mn = 0.0;
    for (std::size_t i = 0; i < log_t.size(); ++i) {
      mt += log_t[i];
      mn += log_norm[i];
    }
    mt /= static_cast<double>(log_t.size());
    mn /= static_cast<double>(log_t.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < log_t.size(); ++i) {
      sxy += (log_t[i] - mt) * (log_norm[i] - mn);
      sxx += (log_t[i] - mt) * (log_t[i] - mt);
    }
    report.envelope_slope = sxy / sxx;
    c.passed = std::isfinite(report.envelope_measured) && c.worst_margin >= -kQuadratureSlack &&
               report.envelope_slope >= -q * alpha - 1e-9;
    if (!c.passed) throw PropertyFailure("clause " + c.clause + " violated" + at(c.worst_t, c.worst_n));
    report.clauses.push_back(c);
  }
  return report;
}

}  // namespace fracsob
