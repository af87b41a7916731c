#pragma once

// Functions on [0, pi] in the orthonormal sine basis w_n(x) = sqrt(2/pi) sin(nx),
// the diagonal operators L, E, M built on it, the semigroup Q(t) generated by
// A = E L^{-1}, fractional powers of -A, and spatial derivatives sampled on a
// collocation grid.

#include <functional>
#include <vector>

namespace fracsob {

/// Coefficients (u_1, ..., u_N) with respect to w_n.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(std::vector<double> coeffs);

  static SpectralField zero(int modes);
  /// w_n truncated to `modes` modes.
  static SpectralField basis(int n, int modes);

  int modes() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::vector<double>& coeffs() noexcept { return coeffs_; }
  /// Coefficient of w_n, n in 1..modes.
  double operator()(int n) const { return coeffs_[static_cast<std::size_t>(n - 1)]; }
  double& operator()(int n) { return coeffs_[static_cast<std::size_t>(n - 1)]; }

  /// L^2(0, pi) norm, equal to the coefficient Euclidean norm.
  double norm() const;
  bool finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  std::vector<double> coeffs_;
};

/// Diagonal operators of the sine basis.
enum class OperatorTag { L, E, M, L_inv, M_inv, Q, A_pow, A };

class OperatorKind {
 public:
  static OperatorKind L() { return {OperatorTag::L, 0.0}; }
  static OperatorKind E() { return {OperatorTag::E, 0.0}; }
  static OperatorKind M() { return {OperatorTag::M, 0.0}; }
  static OperatorKind L_inv() { return {OperatorTag::L_inv, 0.0}; }
  static OperatorKind M_inv() { return {OperatorTag::M_inv, 0.0}; }
  static OperatorKind A() { return {OperatorTag::A, 0.0}; }
  /// Throws DomainError for t < 0.
  static OperatorKind Q(double t);
  /// (-A)^q; throws DomainError unless 0 < q < 1.
  static OperatorKind A_pow(double q);

  OperatorTag tag() const noexcept { return tag_; }
  double parameter() const noexcept { return parameter_; }

  /// Eigenvalue on w_n:
  ///   L: 1+n^2, E: -n^2, M: -n^2, L_inv: 1/(1+n^2), M_inv: -1/n^2,
  ///   A: -n^2/(1+n^2), Q(t): exp(-n^2 t/(1+n^2)), A_pow(q): (n^2/(1+n^2))^q.
  double symbol(int n) const;

 private:
  OperatorKind(OperatorTag tag, double parameter) : tag_(tag), parameter_(parameter) {}
  OperatorTag tag_;
  double parameter_;
};

SpectralField apply_operator(const OperatorKind& kind, const SpectralField& u);

/// max_n |symbol(n)| over n = 1..modes.
double operator_norm(const OperatorKind& kind, int modes);

/// ||u||_q = ||(-A)^q u||.
double q_norm(const SpectralField& u, double q);

/// Interior points x_j = j pi/(Nx+1), j = 1..Nx. The discrete sine transform
/// on this grid is exact for fields with fewer than Nx+1 modes.
class CollocationGrid {
 public:
  /// Nx + 1 = oversample * modes; requires modes >= 1 and oversample >= 4.
  explicit CollocationGrid(int modes, int oversample = 8);

  int modes() const noexcept { return modes_; }
  int size() const noexcept { return static_cast<int>(points_.size()); }
  const std::vector<double>& points() const noexcept { return points_; }
  /// sqrt(2/pi) sin(n x_j), row-major by n.
  double basis(int n, int j) const { return sines_[static_cast<std::size_t>((n - 1) * size() + j)]; }
  double cosine(int n, int j) const { return cosines_[static_cast<std::size_t>((n - 1) * size() + j)]; }

 private:
  int modes_;
  std::vector<double> points_;
  std::vector<double> sines_;
  std::vector<double> cosines_;
};

/// Values of u at the collocation points.
std::vector<double> evaluate(const SpectralField& u, const CollocationGrid& grid);

/// First grid.modes() sine coefficients of sampled values (discrete sine transform).
SpectralField project(const std::vector<double>& values, const CollocationGrid& grid);

/// First N sine coefficients of f, from f sampled on an oversampled grid.
/// Throws DomainError for N < 1.
SpectralField project(const std::function<double(double)>& f, int modes, int oversample = 8);

/// d^i u / dx^i at the collocation points, by exact differentiation of the
/// sine series. i >= 0.
std::vector<double> apply_derivative(int i, const SpectralField& u, const CollocationGrid& grid);

/// B_i u = d^i u/dx^i sampled on the grid for 1 <= i <= r_max. Throws
/// DomainError outside that range and EvaluationError if the samples are
/// not finite.
std::vector<double> apply_Bi(int i, const SpectralField& u, const CollocationGrid& grid, int r_max = 2);

struct BoundConstants {
  double C1 = 0.0;  // ||L^{-1}||
  double C2 = 0.0;  // ||M^{-1}||
  double M0 = 0.0;  // sup_t ||Q(t)||
  double Mq = 0.0;  // sup of t^q ||(-A)^q Q(t)|| over the sampled interval
  double q = 0.0;
};

/// Operator norms over the retained modes. M0 is measured at the samples and
/// Mq over the interval they span. Throws PropertyFailure naming t and n if
/// ||Q(t)|| > 1 at a sample. Requires N >= 4 and nonempty samples.
BoundConstants measure_bounds(int modes, const std::vector<double>& t_samples, double q = 0.25);

}  // namespace fracsob
