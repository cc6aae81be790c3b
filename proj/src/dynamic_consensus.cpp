#include "lac/dynamic_consensus.hpp"

#include <string>

#include "lac/static_consensus.hpp"

namespace lac {

double dyn_exp_initial(double x0, Rate rho) { return rho.scale() * x0; }

double dyn_exp_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                          const NeighborHistory& right, const MeasurementHistory& x, Rate rho) {
  const double lambda = rho.scale();
  const double r = rho.value();
  // Spatial part is the static recursion; the measurement terms inject the
  // newest change and cancel the change already forwarded two rounds ago.
  double next = propagate(k, own, left, right, r, r) + lambda * (x[0] - x[1]);
  if (stage_for(k) == Stage::general) next -= r * r * lambda * (x[2] - x[3]);
  return next;
}

int slot_phase(Round round, int slot, HalfWidth L) noexcept {
  if (round < slot) return -1;
  return (round - slot) % (L.value() + 1);
}

double z_slot_initial(int slot, double x0, HalfWidth L) {
  return slot == 0 ? L.weight() * x0 : 0.0;
}

double z_slot_transition(Round k, int slot, const OwnHistory& own, const NeighborHistory& left,
                         const NeighborHistory& right, double x_next, HalfWidth L) {
  if (slot < 0 || slot > L.value()) {
    fail(ErrorKind::contract, "slot " + std::to_string(slot) + " outside z-vector");
  }
  const int phase = slot_phase(k + 1, slot, L);
  if (phase < 0) {
    if (own.or_zero(0) != 0.0) {
      fail(ErrorKind::internal, "dormant slot " + std::to_string(slot) + " holds a value at round " +
                                    std::to_string(k));
    }
    return 0.0;
  }
  if (phase == 0) return L.weight() * x_next;
  // Phase p replays the static window stage p - 1 of the cycle that began
  // p rounds ago.
  return propagate(phase - 1, own, left, right, 1.0, 1.0);
}

double assemble_y(std::span<const double> current, std::span<const double> previous, Round k,
                  HalfWidth L) {
  const auto width = static_cast<std::size_t>(L.value() + 1);
  if (current.size() != width || previous.size() != width) {
    fail(ErrorKind::contract, "z-vector must have L+1 entries");
  }
  const auto j = static_cast<std::size_t>(k % (L.value() + 1));
  double y = current[j];
  for (std::size_t l = 0; l < width; ++l) {
    if (l != j) y += current[l] - previous[l];
  }
  return y;
}

}  // namespace lac
