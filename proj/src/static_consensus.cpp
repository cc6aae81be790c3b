#include "lac/static_consensus.hpp"

#include <cstdlib>
#include <string>

namespace lac {

double propagate(Round k, const OwnHistory& own, const NeighborHistory& backward,
                 const NeighborHistory& forward, double cb, double cf) {
  if (k < 0) fail(ErrorKind::contract, "transition round must be >= 0");
  switch (stage_for(k)) {
    case Stage::first:
      return own[0] + cb * backward[0] + cf * forward[0];
    case Stage::second:
      return own[0] + cb * (backward[0] - backward[1]) + cf * (forward[0] - forward[1]) -
             2.0 * cb * cf * own[1];
    case Stage::general:
      return own[0] + cb * (backward[0] - backward[1]) + cf * (forward[0] - forward[1]) -
             cb * cf * (own[1] - own[2]);
  }
  fail(ErrorKind::internal, "unreachable stage");
}

double exp_initial(double x, Rate rho) { return rho.scale() * x; }

double exp_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                      const NeighborHistory& right, Rate rho) {
  return propagate(k, own, left, right, rho.value(), rho.value());
}

double asym_initial(double x, Rate rho_backward, Rate rho_forward) {
  const double b = rho_backward.value();
  const double f = rho_forward.value();
  return (1.0 - b) * (1.0 - f) / (1.0 - b * f) * x;
}

double asym_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                       const NeighborHistory& right, Rate rho_backward, Rate rho_forward) {
  return propagate(k, own, left, right, rho_backward.value(), rho_forward.value());
}

double window_initial(double x, HalfWidth L) { return L.weight() * x; }

double window_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                         const NeighborHistory& right, HalfWidth L) {
  if (k + 1 > L.value()) {
    fail(ErrorKind::terminated, "window algorithm with L=" + std::to_string(L.value()) +
                                    " terminated; cannot produce round " + std::to_string(k + 1));
  }
  return propagate(k, own, left, right, 1.0, 1.0);
}

double variable_window_transition(Round k, const OwnHistory& own,
                                  const NeighborHistory& left, const NeighborHistory& right,
                                  HalfWidth L_i, HalfWidth L_left, HalfWidth L_right) {
  if (std::abs(L_i.value() - L_left.value()) > 1 || std::abs(L_i.value() - L_right.value()) > 1) {
    fail(ErrorKind::validation, "neighboring window half-widths differ by more than one");
  }
  return window_transition(k, own, left, right, L_i);
}

double variable_window_weight_sum(const std::vector<int>& L, Sensor i, bool cyclic) {
  const auto n = static_cast<Sensor>(L.size());
  auto half_width = [&](Sensor s) {
    if (cyclic) return L[static_cast<std::size_t>(((s % n) + n) % n)];
    if (s < 0) return L.front();
    if (s >= n) return L.back();
    return L[static_cast<std::size_t>(s)];
  };
  const int Li = half_width(i);
  double sum = 1.0 / (2 * Li + 1);
  for (int j = 1; j <= Li; ++j) {
    sum += 1.0 / (2 * half_width(i - j) + 1) + 1.0 / (2 * half_width(i + j) + 1);
  }
  return sum;
}

}  // namespace lac
