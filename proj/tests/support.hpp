#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lac/chain.hpp"
#include "lac/error.hpp"
#include "lac/field.hpp"
#include "lac/rng.hpp"

namespace lac::test {

/// Uniform values in [-1, 1) for sensors [0, n) and rounds [0, rounds].
inline fields::Table random_rows(Sensor n, Round rounds, std::uint64_t seed) {
  fields::Table table;
  table.sensors = n;
  table.rows.assign(static_cast<std::size_t>(rounds + 1), std::vector<double>(static_cast<std::size_t>(n)));
  for (Round k = 0; k <= rounds; ++k) {
    for (Sensor i = 0; i < n; ++i) {
      table.rows[k][i] = 2.0 * rng::uniform(seed ^ 0x5eedULL, static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(k)) -
                         1.0;
    }
  }
  return table;
}

inline MeasurementField random_field(Sensor n, Round rounds, std::uint64_t seed) {
  return MeasurementField(random_rows(n, rounds, seed), std::nullopt, 2.0);
}

/// Small deterministic generator for property loops.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng::to_unit(next()); }
  long integer(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t next() { return state_ = rng::splitmix64(state_); }
  std::uint64_t state_;
};

inline Sensor wrap(Sensor i, Sensor n) { return ((i % n) + n) % n; }

/// x_i(k) read straight from a table: wrapped on a ring, zero off the line.
inline double cell(const fields::Table& t, Sensor i, Round k, bool periodic) {
  if (periodic) i = wrap(i, t.sensors);
  if (i < 0 || i >= t.sensors) return 0.0;
  const auto& row = t.time_invariant ? t.rows.front() : t.rows[static_cast<std::size_t>(k)];
  return row[static_cast<std::size_t>(i)];
}

inline ChainConfig ring(Sensor n, Round rounds) {
  return ChainConfig{n, boundaries::Ring{}, rounds, 0};
}

inline ChainConfig halo(Sensor n, Round rounds) {
  return ChainConfig{n, boundaries::ZeroHalo{}, rounds, 0};
}

inline ChainConfig truncated(Sensor n, Round rounds) {
  return ChainConfig{n, boundaries::Truncated{}, rounds, 0};
}

}  // namespace lac::test
