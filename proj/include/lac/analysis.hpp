#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lac/algorithm.hpp"
#include "lac/chain.hpp"
#include "lac/field.hpp"
#include "lac/harness.hpp"

namespace lac {

struct TransferSample {
  double omega = 0.0;
  double gain = 0.0;   // magnitude
  double phase = 0.0;  // radians
};

/// Spatial response of exponential weighting on the unit circle:
/// (1-rho)^2 / (1 + rho^2 - 2 rho cos w). Real and positive.
double h_exp(Rate rho, double omega);

/// Spatial transfer function (1-rho)^2 / ((1 - rho/z)(1 - rho z)) at any z.
std::complex<double> h_exp_z(Rate rho, std::complex<double> z);

/// Signed Dirichlet kernel sin((L+1/2)w) / ((2L+1) sin(w/2)), 1 at w = 0.
double h_window(HalfWidth L, double omega);

std::complex<double> k_temporal_exp_response(Rate rho, double omega);
TransferSample k_temporal_exp(Rate rho, double omega);

std::complex<double> k_temporal_window_response(HalfWidth L, double omega);
TransferSample k_temporal_window(HalfWidth L, double omega);

enum class Scheme { spatial_exponential, spatial_window, temporal_exponential, temporal_window };

struct Bandwidth {
  std::optional<double> root;  // first frequency where the gain falls to 1/2
  double rule_of_thumb = 0.0;  // 1-rho, 1.7/(L+1/2) or 4/(L+1/2)
  bool saturated = false;      // gain stays above 1/2 on (0, pi]
};

/// `parameter` is rho for exponential schemes and L for window schemes.
Bandwidth bandwidth(Scheme scheme, double parameter);

double noise_var_exp(Rate rho, double sigma2);
double noise_var_window(HalfWidth L, double sigma2);
double noise_var_global(long N, double sigma2);

struct VarianceMatch {
  double rho = 0.0;
  double exp_variance = 0.0;     // (4L^2 - 4L + 5) / (2L - 1)^3, unit sigma
  double window_variance = 0.0;  // 1 / (2L + 1)
  double ratio() const { return exp_variance / window_variance; }
};

/// rho = (2L - 3)/(2L + 1); L >= 2.
VarianceMatch variance_match_rho(int L);

enum class GainMode { spatial, temporal };

struct GainMeasurement {
  double gain = 0.0;
  double phase = 0.0;
  std::vector<std::string> warnings;
};

/// Least-squares sinusoid fit of y and x at `omega` over rounds >= settle.
/// Spatial mode needs a ring and a harmonic 2 pi m / n.
GainMeasurement measure_gain(const ConsensusTrace& trace, const AlgorithmSpec& algorithm,
                             const MeasurementField& field, double omega, GainMode mode,
                             Round settle);

struct NoiseReport {
  double analytic_variance = 0.0;
  double sampled_variance = 0.0;
  int replicates = 0;
  double standard_error = 0.0;  // sampled * sqrt(2 / (replicates - 1))

  std::string to_json() const;
};

/// Analytic variance of the converged value under independent unit-variance
/// noise scaled by sigma2, for the given chain position of sensor `i`.
double analytic_noise_variance(const AlgorithmSpec& algorithm, double sigma2, Sensor i = 0);

/// Monte Carlo over noisy constant fields: per-sensor variance of the value
/// at the final round across replicates, averaged over real sensors.
NoiseReport monte_carlo_noise(const ChainConfig& chain, const AlgorithmSpec& algorithm,
                              double sigma, int replicates, std::uint64_t master_seed,
                              NoiseDistribution distribution = NoiseDistribution::gaussian);

/// Same for the global average of N noisy measurements.
NoiseReport monte_carlo_noise_global(long N, double sigma, int replicates,
                                     std::uint64_t master_seed,
                                     NoiseDistribution distribution = NoiseDistribution::gaussian);

}  // namespace lac
