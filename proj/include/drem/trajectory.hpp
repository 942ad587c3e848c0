#pragma once

#include <cstddef>
#include <vector>

namespace dremix {

/// Uniform sampling of [t0, t0 + (n-1) dt]. Sample k sits at t0 + k*dt, computed
/// by multiplication so long grids do not accumulate drift.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n);

  /// Grid with step dt covering [t0, t_end]; n = round((t_end - t0)/dt) + 1.
  static TimeGrid covering(double t0, double t_end, double dt);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t size() const { return n_; }
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  double end() const { return time(n_ - 1); }

  /// Nearest sample index to t, clamped to the grid.
  std::size_t index_of(double t) const;

  /// Same t0, half the step, twice the resolution over the same span.
  TimeGrid refined() const { return TimeGrid(t0_, dt_ / 2.0, 2 * (n_ - 1) + 1); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t0_;
  double dt_;
  std::size_t n_;
};

/// A real signal sampled on a TimeGrid. All values are finite.
class Trajectory {
 public:
  explicit Trajectory(TimeGrid grid);  // all zeros
  Trajectory(TimeGrid grid, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double time(std::size_t k) const { return grid_.time(k); }

  /// Piecewise-linear value at t (t must lie within the grid span).
  double at(double t) const;

  /// Four-point cubic Lagrange value at t. Used for RK4 stage evaluations of sampled
  /// data, where linear interpolation would drop the stepper to second order.
  double smooth_at(double t) const;

  double max_abs() const;
  double max_abs_from(double t_from) const;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
};

}  // namespace dremix
