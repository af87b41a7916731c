#pragma once

// Piecewise-constant-in-time spectral controls u_1, ..., u_k on a time grid,
// with the integral-norm ball that defines the admissible set.

#include <vector>

#include "fracsob/fracops.hpp"
#include "fracsob/spectral.hpp"

namespace fracsob {

class ControlBundle {
 public:
  /// k zero controls with `modes` sine modes on each of the grid's cells.
  ControlBundle(int count, TimeGrid grid, int modes, double radius = 1.0);

  int count() const noexcept { return count_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  int modes() const noexcept { return modes_; }
  double radius() const noexcept { return radius_; }
  int cells() const noexcept { return grid_.steps(); }

  /// Value of control j (0-based) on cell i, [t_i, t_{i+1}).
  const SpectralField& value(int j, int i) const { return values_[slot(j, i)]; }
  SpectralField& value(int j, int i) { return values_[slot(j, i)]; }

  /// sum_j int_0^a ||u_j(s)|| ds; the constraint is admissibility() <= radius.
  double admissibility() const;

  /// All coefficients as one vector, ordered by control, cell, mode.
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
  std::size_t dimension() const noexcept { return values_.size() * static_cast<std::size_t>(modes_); }

 private:
  std::size_t slot(int j, int i) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(cells()) + static_cast<std::size_t>(i);
  }

  int count_;
  TimeGrid grid_;
  int modes_;
  double radius_;
  std::vector<SpectralField> values_;
};

}  // namespace fracsob
