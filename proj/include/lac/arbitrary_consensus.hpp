#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lac/field.hpp"
#include "lac/history.hpp"
#include "lac/params.hpp"

namespace lac {

/// Banded weights a_{i,i+j} for sensors [0, n) and offsets |j| <= radius,
/// with one global normalization constant K.
class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(Sensor sensors, int radius, double K);

  /// a_{i,i+j} = rho^|j|, K = (1 + rho) / (1 - rho).
  static WeightTable geometric(Sensor sensors, Rate rho, int radius);

  /// CSV with header `sensor,offset,weight`. Sensors and radius are inferred;
  /// unlisted entries stay zero (and fail validation).
  static WeightTable read_csv(std::istream& in, double K);

  void set(Sensor i, int offset, double weight);
  double at(Sensor i, int offset) const;

  Sensor sensors() const noexcept { return sensors_; }
  int radius() const noexcept { return radius_; }
  double K() const noexcept { return K_; }
  void set_K(double K) noexcept { K_ = K; }

  /// a_ii + sum_{j=1..R} (a_{i,i-j} + a_{i,i+j})
  double row_sum(Sensor i) const;

 private:
  Sensor sensors_ = 0;
  int radius_ = 0;
  double K_ = 1.0;
  std::vector<double> weights_;
};

struct WeightIssue {
  Sensor sensor = 0;
  double row_sum = 0.0;
  std::vector<int> zero_offsets;
};

struct WeightReport {
  bool ok = true;
  double K = 0.0;
  double tolerance = 0.0;
  std::vector<WeightIssue> issues;

  std::string to_json() const;
};

/// Checks a_ij != 0 for every stored entry and |row_sum - K| <= tol_K.
WeightReport validate_weights(const WeightTable& table, double tol_K);

/// Forward / backward accumulators of one sensor.
struct FBState {
  double forward = 0.0;
  double backward = 0.0;
};

/// Weight rows visible to sensor i: its own and its two neighbors'.
struct LocalWeights {
  const WeightTable* table = nullptr;
  Sensor own_row = 0;
  Sensor forward_row = 0;   // row of sensor i + 1
  Sensor backward_row = 0;  // row of sensor i - 1

  double own(int offset) const { return table->at(own_row, offset); }
  double forward(int offset) const { return table->at(forward_row, offset); }
  double backward(int offset) const { return table->at(backward_row, offset); }
  double K() const { return table->K(); }
  int radius() const { return table->radius(); }
};

FBState fb_initial(double x, const LocalWeights& weights);

/// State at round k + 1. `forward_neighbor` holds y^F_{i+1}(k), y^F_{i+1}(k-1);
/// `backward_neighbor` holds y^B_{i-1}(k), y^B_{i-1}(k-1). Beyond the table
/// radius the accumulators stay put.
FBState fb_transition(Round k, const FBState& own, const NeighborHistory& forward_neighbor,
                      const NeighborHistory& backward_neighbor, const LocalWeights& weights);

/// y_i = y^F + y^B - a_ii x_i / K (the initial term is counted twice).
double glue(const FBState& state, double x, const LocalWeights& weights);

}  // namespace lac
