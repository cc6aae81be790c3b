#pragma once

#include <vector>

#include "lac/field.hpp"
#include "lac/history.hpp"
#include "lac/params.hpp"

// Per-sensor transitions for time-invariant measurements. Every transition is
// a pure function of explicit histories: at most three own rounds and two
// rounds per neighbor.
namespace lac {

/// Stage of a two-sided propagation step producing y(k+1).
enum class Stage { first, second, general };

constexpr Stage stage_for(Round k) noexcept {
  constexpr Stage table[] = {Stage::first, Stage::second};
  return k < 2 ? table[k] : Stage::general;
}

/// Shared recursion behind the exponential, asymmetric and window schemes:
///   y(1)   = y(0) + cb*l(0) + cf*r(0)
///   y(2)   = y(1) + cb*dl + cf*dr - 2*cb*cf*y(0)
///   y(k+1) = y(k) + cb*dl + cf*dr - cb*cf*(y(k-1) - y(k-2))
/// where dl, dr are the latest neighbor differences.
double propagate(Round k, const OwnHistory& own, const NeighborHistory& backward,
                 const NeighborHistory& forward, double cb, double cf);

double exp_initial(double x, Rate rho);
double exp_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                      const NeighborHistory& right, Rate rho);

double asym_initial(double x, Rate rho_backward, Rate rho_forward);
double asym_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                       const NeighborHistory& right, Rate rho_backward, Rate rho_forward);

double window_initial(double x, HalfWidth L);
/// Defined for k + 1 <= L; later calls throw `terminated`.
double window_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                         const NeighborHistory& right, HalfWidth L);

/// Window step for per-sensor half-widths. Throws validation when a neighbor's
/// half-width differs from L_i by more than one.
double variable_window_transition(Round k, const OwnHistory& own,
                                  const NeighborHistory& left, const NeighborHistory& right,
                                  HalfWidth L_i, HalfWidth L_left, HalfWidth L_right);

/// Sum of the final-value weights 1/(2L_i+1) + sum_j 1/(2L_{i+-j}+1) at sensor i.
/// Equals 1 only when the profile is locally uniform. `cyclic` wraps indices;
/// otherwise out-of-range neighbors reuse the nearest edge value.
double variable_window_weight_sum(const std::vector<int>& L, Sensor i, bool cyclic);

}  // namespace lac
