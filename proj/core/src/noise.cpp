#include "chldp/noise.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>

#include "chldp/norms.hpp"
#include "chldp/stats.hpp"

namespace chldp {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kReplicaMul = 0x632BE59BD9B4E019ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_master(std::uint64_t master, std::uint64_t tag) noexcept {
  return mix64(mix64(master + kGolden) ^ mix64(tag * kReplicaMul + 0x2545F4914F6CDD1DULL));
}

CounterStream::CounterStream(const SeedSpec& seed)
    : key_(mix64(mix64(seed.master) ^ mix64(seed.replica + kReplicaMul * seed.rule))) {
  if (seed.rule != 1) throw InvalidArgument("unknown seed derivation rule");
}

std::uint64_t CounterStream::word(std::uint64_t counter) const noexcept { return mix64(key_ + (counter + 1) * kGolden); }

double CounterStream::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>((word(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterStream::normal(std::uint64_t index) const noexcept {
  const std::uint64_t pair = index / 2;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
}

NoisePath sample_sheet(const Grid& grid, const TimeGrid& time, const SeedSpec& seed) {
  grid.validate();
  time.validate();
  NoisePath w(grid, time);
  const CounterStream stream(seed);
  const double scale = std::sqrt(time.dt * grid.cell_volume());
  auto& data = w.data();
  // Draw in pairs so each Box-Muller evaluation is used for both branches.
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2) {
    const std::uint64_t pair = i / 2;
    const double u1 = stream.uniform(2 * pair);
    const double u2 = stream.uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    data[i] = scale * r * std::cos(angle);
    data[i + 1] = scale * r * std::sin(angle);
  }
  if (i < data.size()) data[i] = scale * stream.normal(i);
  return w;
}

NoisePath shift_increments(const NoisePath& w, const ControlPath& v, double epsilon) {
  if (!(w.grid() == v.grid()) || !(w.time() == v.time())) throw InvalidArgument("noise and control shapes differ");
  if (!(epsilon >= 0.0)) throw InvalidArgument("noise scale must be nonnegative");
  NoisePath out(w.grid(), w.time());
  const double root_eps = std::sqrt(epsilon);
  const double cell = w.time().dt * w.grid().cell_volume();
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = root_eps * w.data()[i] + cell * v.data()[i];
  return out;
}

double girsanov_log_weight(const NoisePath& w, const ControlPath& v, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("Girsanov weight needs a positive noise scale");
  if (!(w.grid() == v.grid()) || !(w.time() == v.time())) throw InvalidArgument("noise and control shapes differ");
  std::vector<double> prod(w.data().size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = v.data()[i] * w.data()[i];
  const double stochastic = stats::pairwise_sum(prod);
  return -stochastic / std::sqrt(epsilon) - control_norm_sq(v) / (2.0 * epsilon);
}

NoisePath coarsen_in_time(const NoisePath& fine) {
  if (fine.time().steps % 2 != 0) throw InvalidArgument("coarsening needs an even number of steps");
  const TimeGrid coarse_time{2.0 * fine.time().dt, fine.time().steps / 2};
  NoisePath coarse(fine.grid(), coarse_time);
  for (std::size_t m = 0; m < coarse_time.steps; ++m) {
    auto a = fine.at(2 * m);
    auto b = fine.at(2 * m + 1);
    auto c = coarse.at(m);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = a[j] + b[j];
  }
  return coarse;
}

void dump_noise(const NoisePath& w, std::ostream& out) {
  for (double x : w.data()) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    out.write(bytes, 8);
  }
}

}  // namespace chldp
