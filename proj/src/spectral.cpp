#include "fracsob/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracsob/errors.hpp"

namespace fracsob {

namespace {

const double kBasisScale = std::sqrt(2.0 / std::numbers::pi);

void require_same_modes(const SpectralField& a, const SpectralField& b) {
  if (a.modes() != b.modes()) {
    throw DomainError("mode count mismatch: " + std::to_string(a.modes()) + " vs " + std::to_string(b.modes()));
  }
}

}  // namespace

SpectralField::SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::zero(int modes) {
  if (modes < 1) throw DomainError("mode count must be at least 1, got " + std::to_string(modes));
  return SpectralField(std::vector<double>(static_cast<std::size_t>(modes), 0.0));
}

SpectralField SpectralField::basis(int n, int modes) {
  if (n < 1 || n > modes) throw DomainError("basis index " + std::to_string(n) + " outside 1.." + std::to_string(modes));
  SpectralField u = zero(modes);
  u(n) = 1.0;
  return u;
}

double SpectralField::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

bool SpectralField::finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_modes(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_modes(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

OperatorKind OperatorKind::Q(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("Q(t) requires t >= 0, got " + std::to_string(t));
  return {OperatorTag::Q, t};
}

OperatorKind OperatorKind::A_pow(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("A_pow(q) requires 0 < q < 1, got " + std::to_string(q));
  return {OperatorTag::A_pow, q};
}

double OperatorKind::symbol(int n) const {
  if (n < 1) throw DomainError("mode index must be positive, got " + std::to_string(n));
  const double n2 = static_cast<double>(n) * n;
  const double lambda = n2 / (1.0 + n2);
  switch (tag_) {
    case OperatorTag::L: return 1.0 + n2;
    case OperatorTag::E: return -n2;
    case OperatorTag::M: return -n2;
    case OperatorTag::L_inv: return 1.0 / (1.0 + n2);
    case OperatorTag::M_inv: return -1.0 / n2;
    case OperatorTag::A: return -lambda;
    case OperatorTag::Q: return std::exp(-lambda * parameter_);
    case OperatorTag::A_pow: return std::pow(lambda, parameter_);
  }
  throw DomainError("unknown operator kind");
}

SpectralField apply_operator(const OperatorKind& kind, const SpectralField& u) {
  SpectralField out = u;
  for (int n = 1; n <= u.modes(); ++n) out(n) *= kind.symbol(n);
  return out;
}

double operator_norm(const OperatorKind& kind, int modes) {
  double best = 0.0;
  for (int n = 1; n <= modes; ++n) best = std::max(best, std::abs(kind.symbol(n)));
  return best;
}

double q_norm(const SpectralField& u, double q) {
  double s = 0.0;
  for (int n = 1; n <= u.modes(); ++n) {
    const double n2 = static_cast<double>(n) * n;
    const double c = std::pow(n2 / (1.0 + n2), q) * u(n);
    s += c * c;
  }
  return std::sqrt(s);
}

CollocationGrid::CollocationGrid(int modes, int oversample) : modes_(modes) {
  if (modes < 1) throw DomainError("mode count must be at least 1, got " + std::to_string(modes));
  if (oversample < 4) throw DomainError("collocation oversampling must be at least 4");
  const int cells = oversample * modes;
  const int nx = cells - 1;
  points_.resize(static_cast<std::size_t>(nx));
  for (int j = 0; j < nx; ++j) points_[static_cast<std::size_t>(j)] = (j + 1) * std::numbers::pi / cells;
  sines_.resize(static_cast<std::size_t>(modes) * nx);
  cosines_.resize(static_cast<std::size_t>(modes) * nx);
  for (int n = 1; n <= modes; ++n) {
    for (int j = 0; j < nx; ++j) {
      // reduce n (j+1) mod 2 cells so the angle stays in [0, 2 pi)
      const long k = (static_cast<long>(n) * (j + 1)) % (2L * cells);
      const double angle = k * std::numbers::pi / cells;
      sines_[static_cast<std::size_t>((n - 1) * nx + j)] = kBasisScale * std::sin(angle);
      cosines_[static_cast<std::size_t>((n - 1) * nx + j)] = kBasisScale * std::cos(angle);
    }
  }
}

std::vector<double> evaluate(const SpectralField& u, const CollocationGrid& grid) {
  return apply_derivative(0, u, grid);
}

SpectralField project(const std::vector<double>& values, const CollocationGrid& grid) {
  if (static_cast<int>(values.size()) != grid.size()) {
    throw DomainError("projection needs " + std::to_string(grid.size()) + " samples, got " +
                      std::to_string(values.size()));
  }
  const double h = std::numbers::pi / (grid.size() + 1);
  SpectralField u = SpectralField::zero(grid.modes());
  for (int n = 1; n <= grid.modes(); ++n) {
    double s = 0.0;
    for (int j = 0; j < grid.size(); ++j) s += values[static_cast<std::size_t>(j)] * grid.basis(n, j);
    u(n) = h * s;
  }
  return u;
}

SpectralField project(const std::function<double(double)>& f, int modes, int oversample) {
  if (modes < 1) throw DomainError("mode count must be at least 1, got " + std::to_string(modes));
  const CollocationGrid grid(modes, oversample);
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) values[static_cast<std::size_t>(j)] = f(grid.points()[static_cast<std::size_t>(j)]);
  return project(values, grid);
}

std::vector<double> apply_derivative(int i, const SpectralField& u, const CollocationGrid& grid) {
  if (i < 0) throw DomainError("derivative order must be nonnegative");
  if (u.modes() > grid.modes()) throw DomainError("field has more modes than the collocation grid resolves");
  // d^i/dx^i sin(nx) = n^i * {sin, cos, -sin, -cos}[i mod 4]
  const bool use_cosine = i % 2 == 1;
  const double sign = (i % 4 == 2 || i % 4 == 3) ? -1.0 : 1.0;
  std::vector<double> out(static_cast<std::size_t>(grid.size()), 0.0);
  for (int n = 1; n <= u.modes(); ++n) {
    const double c = sign * std::pow(static_cast<double>(n), i) * u(n);
    if (c == 0.0) continue;
    for (int j = 0; j < grid.size(); ++j) {
      out[static_cast<std::size_t>(j)] += c * (use_cosine ? grid.cosine(n, j) : grid.basis(n, j));
    }
  }
  return out;
}

std::vector<double> apply_Bi(int i, const SpectralField& u, const CollocationGrid& grid, int r_max) {
  if (i < 1 || i > r_max) {
    throw DomainError("B_" + std::to_string(i) + " outside the configured orders 1.." + std::to_string(r_max));
  }
  auto out = apply_derivative(i, u, grid);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!std::isfinite(out[j])) throw EvaluationError("B_" + std::to_string(i) + " sample not finite", out[j]);
  }
  return out;
}

BoundConstants measure_bounds(int modes, const std::vector<double>& t_samples, double q) {
  if (modes < 4) throw DomainError("bound measurement needs at least 4 modes");
  if (t_samples.empty()) throw DomainError("bound measurement needs time samples");
  BoundConstants b;
  b.q = q;
  b.C1 = operator_norm(OperatorKind::L_inv(), modes);
  b.C2 = operator_norm(OperatorKind::M_inv(), modes);
  for (double t : t_samples) {
    const auto qt = OperatorKind::Q(t);
    for (int n = 1; n <= modes; ++n) {
      const double s = qt.symbol(n);
      if (s > 1.0) {
        throw PropertyFailure("||Q(t)|| exceeds 1 at t=" + std::to_string(t) + ", n=" + std::to_string(n));
      }
      b.M0 = std::max(b.M0, s);
    }
  }
  // t^q ||(-A)^q Q(t)|| on mode n is (lambda t)^q exp(-lambda t), unimodal in t
  // with its peak at t = q/lambda; take the sup over the sampled interval.
  const auto [t_lo, t_hi] = std::minmax_element(t_samples.begin(), t_samples.end());
  for (int n = 1; n <= modes; ++n) {
    const double lambda = -OperatorKind::A().symbol(n);
    const double t = std::clamp(q / lambda, *t_lo, *t_hi);
    if (t > 0.0) b.Mq = std::max(b.Mq, std::pow(lambda * t, q) * std::exp(-lambda * t));
  }
  return b;
}

}  // namespace fracsob
