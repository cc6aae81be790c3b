#pragma once

#include <span>

#include "lac/field.hpp"
#include "lac/history.hpp"
#include "lac/params.hpp"

namespace lac {

/// Own measurements x_i(k+1), x_i(k), x_i(k-1), x_i(k-2).
using MeasurementHistory = Recent<4>;

double dyn_exp_initial(double x0, Rate rho);

/// y_i(k+1) for time-varying measurements. Needs no neighbor measurements,
/// only neighbor consensus values and the sensor's own measurement history
/// (`x[0]` = x_i(k+1)).
double dyn_exp_transition(Round k, const OwnHistory& own, const NeighborHistory& left,
                          const NeighborHistory& right, const MeasurementHistory& x,
                          Rate rho);

/// Phase of slot j at `round`: -1 while dormant (round < j), otherwise
/// (round - j) mod (L + 1). Phase 0 is a restart.
int slot_phase(Round round, int slot, HalfWidth L) noexcept;

/// z_{ij}(0): slot 0 records x_i(0) / (2L+1), every other slot is zero.
double z_slot_initial(int slot, double x0, HalfWidth L);

/// z_{ij}(k+1). `own` holds z_{ij}(k), z_{ij}(k-1), z_{ij}(k-2) and the
/// neighbor histories hold slot j of the neighbors' z-vectors.
double z_slot_transition(Round k, int slot, const OwnHistory& own, const NeighborHistory& left,
                         const NeighborHistory& right, double x_next, HalfWidth L);

/// y_i(k) = z_{ij}(k) + sum_{l != j} (z_{il}(k) - z_{il}(k-1)), j = k mod (L+1).
/// For k = 0 pass an all-zero `previous`.
double assemble_y(std::span<const double> current, std::span<const double> previous,
                  Round k, HalfWidth L);

}  // namespace lac
