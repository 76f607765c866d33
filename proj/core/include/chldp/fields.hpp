#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chldp/grid.hpp"

namespace chldp {

/// Uniform time grid t_m = m * dt, m = 0..steps.
struct TimeGrid {
  double dt = 1e-4;
  std::size_t steps = 5000;

  double horizon() const noexcept { return dt * static_cast<double>(steps); }
  void validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (steps == 0) throw InvalidArgument("time grid needs at least one step");
  }
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct TrajectoryMeta {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::string control_id = "none";
};

/// Grid values u(t_m, .) for m = 0..steps, stored contiguously.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Grid grid, TimeGrid time)
      : grid_(grid), time_(time), values_((time.steps + 1) * grid.size(), 0.0) {}

  const Grid& grid() const noexcept { return grid_; }
  const TimeGrid& time() const noexcept { return time_; }
  std::size_t steps() const noexcept { return time_.steps; }
  std::size_t points() const noexcept { return time_.steps + 1; }
  double t(std::size_t m) const noexcept { return time_.dt * static_cast<double>(m); }

  std::span<const double> at(std::size_t m) const { return {values_.data() + m * grid_.size(), grid_.size()}; }
  std::span<double> at(std::size_t m) { return {values_.data() + m * grid_.size(), grid_.size()}; }
  GridField field(std::size_t m) const {
    auto s = at(m);
    return GridField(grid_, std::vector<double>(s.begin(), s.end()));
  }
  const std::vector<double>& data() const noexcept { return values_; }

  TrajectoryMeta meta;

 private:
  Grid grid_;
  TimeGrid time_;
  std::vector<double> values_;
};

/// Control v(t, x) held piecewise constant on [t_m, t_{m+1}) x cell_j, m < steps.
class ControlPath {
 public:
  ControlPath() = default;
  ControlPath(Grid grid, TimeGrid time) : grid_(grid), time_(time), values_(time.steps * grid.size(), 0.0) {}
  ControlPath(Grid grid, TimeGrid time, std::vector<double> values)
      : grid_(grid), time_(time), values_(std::move(values)) {
    if (values_.size() != time_.steps * grid_.size()) throw InvalidArgument("control length does not match grid");
  }

  const Grid& grid() const noexcept { return grid_; }
  const TimeGrid& time() const noexcept { return time_; }
  std::size_t steps() const noexcept { return time_.steps; }

  std::span<const double> at(std::size_t m) const { return {values_.data() + m * grid_.size(), grid_.size()}; }
  std::span<double> at(std::size_t m) { return {values_.data() + m * grid_.size(), grid_.size()}; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  /// Radius^2 N of the S^N ball this control is claimed to belong to.
  std::optional<double> bound;

 private:
  Grid grid_;
  TimeGrid time_;
  std::vector<double> values_;
};

inline bool same_shape(const ControlPath& a, const ControlPath& b) {
  return a.grid() == b.grid() && a.time() == b.time();
}

}  // namespace chldp
