#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "chldp/fields.hpp"

namespace chldp {

/// Identifies one reproducible noise stream.
///
/// Derivation rule 1 ("splitmix-counter-v1"):
///   key     = mix64(mix64(master) ^ mix64(replica + 0x632BE59BD9B4E019 * rule))
///   word_i  = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
/// where mix64 is the SplitMix64 finalizer. Word i depends only on
/// (master, replica, i), so streams can be generated in any order or thread.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t replica = 0;
  std::uint32_t rule = 1;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Child master seed for a tagged sub-experiment (e.g. one epsilon of a schedule).
std::uint64_t derive_master(std::uint64_t master, std::uint64_t tag) noexcept;

/// Counter-based stream of 64-bit words and standard normals.
class CounterStream {
 public:
  explicit CounterStream(const SeedSpec& seed);

  std::uint64_t word(std::uint64_t counter) const noexcept;
  /// Uniform in (0, 1], 53-bit resolution.
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal number `index`: Box-Muller on words 2p and 2p+1 with
  /// p = index / 2, cosine branch for even index, sine branch for odd.
  double normal(std::uint64_t index) const noexcept;

 private:
  std::uint64_t key_;
};

/// Brownian-sheet cell increments dW_{m,j}, each N(0, dt * h).
class NoisePath {
 public:
  NoisePath() = default;
  NoisePath(Grid grid, TimeGrid time) : grid_(grid), time_(time), values_(time.steps * grid.size(), 0.0) {}

  const Grid& grid() const noexcept { return grid_; }
  const TimeGrid& time() const noexcept { return time_; }
  std::span<const double> at(std::size_t m) const { return {values_.data() + m * grid_.size(), grid_.size()}; }
  std::span<double> at(std::size_t m) { return {values_.data() + m * grid_.size(), grid_.size()}; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

 private:
  Grid grid_;
  TimeGrid time_;
  std::vector<double> values_;
};

NoisePath sample_sheet(const Grid& grid, const TimeGrid& time, const SeedSpec& seed);

/// sqrt(eps) dW + dt h v: the cell increments of sqrt(eps) W + I(v).
NoisePath shift_increments(const NoisePath& w, const ControlPath& v, double epsilon);

/// log dQ/dP = -(1/sqrt(eps)) sum v dW - (1/(2 eps)) ||v||^2.
double girsanov_log_weight(const NoisePath& w, const ControlPath& v, double epsilon);

/// Sums consecutive pairs of time steps: a path at dt/2 becomes one at dt.
NoisePath coarsen_in_time(const NoisePath& fine);

/// Writes the increments as little-endian IEEE-754 doubles, row-major (m, j).
void dump_noise(const NoisePath& w, std::ostream& out);

}  // namespace chldp
