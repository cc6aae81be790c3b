#pragma once

#include <variant>
#include <vector>

#include "lac/algorithm.hpp"
#include "lac/chain.hpp"
#include "lac/field.hpp"

// Direct evaluation of the target averages. Nothing here shares code with the
// distributed transitions.
namespace lac::oracle {

/// How indices outside [0, n) are read: wrapped, or as zero measurements.
struct Domain {
  Sensor n = 0;
  bool periodic = true;

  static Domain from(const ChainConfig& chain);
};

struct RoundLimit {
  Round k = 0;
};
struct TailTolerance {
  double epsilon = 0.0;
};
using Truncation = std::variant<RoundLimit, TailTolerance>;

struct Value {
  double value = 0.0;
  /// Bound on the neglected tail, lambda * 2M rho^{k+1} / (1 - rho).
  double tail_bound = 0.0;
};

Value exp_target(const MeasurementField& field, Sensor i, Rate rho, Truncation truncation,
                 const Domain& domain);
double asym_target(const MeasurementField& field, Sensor i, Rate rho_backward,
                   Rate rho_forward, Round k, const Domain& domain);
/// Throws validation on a ring shorter than 2L + 1.
double window_target(const MeasurementField& field, Sensor i, HalfWidth L,
                     const Domain& domain);
/// Partial window after k rounds (k >= L_i gives the final value).
double window_partial_target(const MeasurementField& field, Sensor i, HalfWidth L, Round k,
                             const Domain& domain);
double variable_window_target(const MeasurementField& field, Sensor i,
                              const std::vector<int>& L, Round k, const Domain& domain);
double arbitrary_target(const MeasurementField& field, Sensor i, const WeightTable& table,
                        Round k, const Domain& domain);
double dyn_exp_target(const MeasurementField& field, Sensor i, Round k, Rate rho,
                      const Domain& domain);
double dyn_window_target(const MeasurementField& field, Sensor i, Round k, HalfWidth L,
                         const Domain& domain);

/// Target of `algorithm` at sensor i after k rounds.
double target(const AlgorithmSpec& algorithm, const MeasurementField& field, Sensor i,
              Round k, const Domain& domain);

}  // namespace lac::oracle
