#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace lac {

using Sensor = long;
using Round = int;

enum class NoiseDistribution { gaussian, uniform };

/// Additive zero-mean noise with standard deviation `sigma`, independent
/// across (sensor, round) and reproducible from `seed`.
struct NoiseSpec {
  double sigma = 0.0;
  NoiseDistribution distribution = NoiseDistribution::gaussian;
  std::uint64_t seed = 0;
};

class MeasurementField;

namespace fields {

struct Constant {
  double value = 0.0;
};

struct Impulse {
  Sensor center = 0;
  double height = 1.0;
};

/// amplitude * cos(omega * i + phase), constant in time.
struct SpatialCosine {
  double amplitude = 1.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// amplitude * cos(omega * k + phase), uniform in space.
struct TemporalCosine {
  double amplitude = 1.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// Explicit values for sensors [0, sensors). `rows[k][i]`; a time-invariant
/// table holds a single row used for every round.
struct Table {
  Sensor sensors = 0;
  std::vector<std::vector<double>> rows;
  bool time_invariant = false;
};

struct Sum {
  std::vector<MeasurementField> terms;
};

}  // namespace fields

using FieldKind = std::variant<fields::Constant, fields::Impulse, fields::SpatialCosine,
                               fields::TemporalCosine, fields::Table, fields::Sum>;

class MeasurementField {
 public:
  MeasurementField() = default;
  MeasurementField(FieldKind kind, std::optional<NoiseSpec> noise = std::nullopt,
                   double bound = 1e12)
      : kind_(std::move(kind)), noise_(noise), bound_(bound) {}

  const FieldKind& kind() const noexcept { return kind_; }
  const std::optional<NoiseSpec>& noise() const noexcept { return noise_; }
  /// Declared bound M with |x_i(k)| < M.
  double bound() const noexcept { return bound_; }

  MeasurementField with_noise(NoiseSpec noise) const {
    MeasurementField copy = *this;
    copy.noise_ = noise;
    return copy;
  }

  /// True when no term depends on the round index (noise excluded).
  bool time_invariant() const;

  /// Throws a validation error on non-finite parameters or malformed tables.
  void validate() const;

 private:
  FieldKind kind_ = fields::Constant{};
  std::optional<NoiseSpec> noise_;
  double bound_ = 1e12;
};

/// x_i(k). Throws out_of_domain for table lookups outside the table or
/// values exceeding the declared bound.
double evaluate_field(const MeasurementField& field, Sensor i, Round k);

/// Row-major convenience: table with `values[i]` for every round.
MeasurementField static_table(std::vector<double> values, double bound = 1e12);

}  // namespace lac
