#include "fracsob/controls.hpp"

#include <cmath>
#include <string>

#include "fracsob/errors.hpp"

namespace fracsob {

ControlBundle::ControlBundle(int count, TimeGrid grid, int modes, double radius)
    : count_(count), grid_(grid), modes_(modes), radius_(radius) {
  if (count < 0) throw DomainError("control count must be nonnegative");
  if (modes < 1) throw DomainError("control mode count must be at least 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("admissible radius must be positive, got " + std::to_string(radius));
  }
  values_.assign(static_cast<std::size_t>(count) * static_cast<std::size_t>(grid.steps()), SpectralField::zero(modes));
}

double ControlBundle::admissibility() const {
  const double h = grid_.step();
  double s = 0.0;
  for (const auto& v : values_) s += h * v.norm();
  return s;
}

std::vector<double> ControlBundle::flatten() const {
  std::vector<double> flat;
  flat.reserve(dimension());
  for (const auto& v : values_) flat.insert(flat.end(), v.coeffs().begin(), v.coeffs().end());
  return flat;
}

void ControlBundle::assign(const std::vector<double>& flat) {
  if (flat.size() != dimension()) {
    throw DomainError("control vector has " + std::to_string(flat.size()) + " entries, expected " +
                      std::to_string(dimension()));
  }
  std::size_t k = 0;
  for (auto& v : values_) {
    for (double& c : v.coeffs()) c = flat[k++];
  }
}

}  // namespace fracsob
