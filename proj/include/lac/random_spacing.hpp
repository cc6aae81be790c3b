#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lac/arbitrary_consensus.hpp"
#include "lac/field.hpp"
#include "lac/params.hpp"

namespace lac {

namespace spacing {
/// Gaps with density e^{-d}.
struct ExpDensity {};
/// Gaps uniform on [1 - eta, 1 + eta], eta in (0, 1).
struct Uniform {
  double eta = 0.0;
};
}  // namespace spacing

using SpacingLaw = std::variant<spacing::ExpDensity, spacing::Uniform>;

std::string spacing_law_name(const SpacingLaw& law);
void validate(const SpacingLaw& law);

/// Gaps around a centre sensor 0: sensors -m..m, `gaps[g]` is the distance
/// between sensors g - m and g - m + 1.
class SpacingDraw {
 public:
  SpacingDraw() = default;
  explicit SpacingDraw(std::vector<double> gaps);

  /// Unit gaps everywhere.
  static SpacingDraw unit(Sensor half_count);

  Sensor half_count() const noexcept { return static_cast<Sensor>(gaps_.size() / 2); }
  Sensor first_sensor() const noexcept { return -half_count(); }
  Sensor last_sensor() const noexcept { return half_count(); }

  /// d_{i,i+1}
  double gap(Sensor i) const;
  /// d_{i,j} as the sum of the gaps between them.
  double distance(Sensor i, Sensor j) const;

  const std::vector<double>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> gaps_;
};

/// 2 * half_count independent gaps. Gap g depends only on (seed, g), so a
/// longer draw extends a shorter one.
SpacingDraw sample_spacings(const SpacingLaw& law, Sensor half_count, std::uint64_t seed);

/// E[rho^d] and E[rho^{2d}] for one gap.
double expected_xi(Rate rho, const SpacingLaw& law);
double expected_xi_squared(Rate rho, const SpacingLaw& law);

/// (-log rho) / (2 - log rho)
double k_poisson(Rate rho);
double k_uniform(Rate rho, double eta);
/// (1 - E[xi]) / (1 + E[xi]) for the given law.
double k_for(Rate rho, const SpacingLaw& law);

struct SpacingMoments {
  double K = 0.0;
  double E_xi = 0.0;
  double E_xi2 = 0.0;
  double var_xi = 0.0;
  double E_u = 0.0;
  double var_u = 0.0;
  double var_y = 0.0;
};

/// Closed forms for the exponential law.
SpacingMoments spacing_moments(Rate rho);
/// Same chain of identities for any law (var_u by the fixed-point relation).
SpacingMoments spacing_moments(Rate rho, const SpacingLaw& law);

/// K [x_i + sum_j rho^{d_{i,i+j}} x_{i+j} + sum_j rho^{d_{i,i-j}} x_{i-j}],
/// truncated where rho^d < tail_eps. Throws needs_more_sensors when the draw
/// ends first.
double weighted_target(const SpacingDraw& draw, const MeasurementField& field, Sensor i,
                       Rate rho, double K, double tail_eps = 1e-12);

struct SpacingReport {
  double rho = 0.0;
  std::string law;
  double K_analytic = 0.0;
  double mean = 0.0;
  double mean_se = 0.0;
  double var_analytic = 0.0;
  double var_sampled = 0.0;
  double var_se = 0.0;
  int replicates = 0;

  std::string to_json() const;
};

/// All-ones field, K from the law's closed form; independent draws per replicate.
SpacingReport monte_carlo_spacing(Rate rho, const SpacingLaw& law, int replicates,
                                  std::uint64_t seed, double tail_eps = 1e-12);

/// Weights a_{i,i+j} = rho^{d_{i,i+j}} over sensors 0..n-1 of the draw
/// (sensor s of the table is draw sensor s - n/2), K = 1.
WeightTable spacing_weight_table(const SpacingDraw& draw, Sensor sensors, Rate rho,
                                 int radius);

enum class Normalization { none, analytic, row_sums };

/// Turns raw weighted sums (K = 1) into consensus values: scale by the law's
/// K, or divide by each row's own weight sum.
double normalize_raw_sum(double raw, Normalization mode, double analytic_K, double row_sum);

}  // namespace lac
