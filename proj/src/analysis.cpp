#include "lac/analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "lac/parallel.hpp"
#include "lac/rng.hpp"

namespace lac {
namespace {

constexpr double kPi = std::numbers::pi;

/// Running mean and variance (Welford); constant input gives exactly zero.
struct Moments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

double unit_noise(std::uint64_t seed, std::uint64_t i, NoiseDistribution distribution) {
  if (distribution == NoiseDistribution::gaussian) return rng::normal(seed, i, 0);
  return std::sqrt(3.0) * (2.0 * rng::uniform(seed, i, 0) - 1.0);
}

NoiseReport make_report(double analytic, double sampled, int replicates) {
  NoiseReport report;
  report.analytic_variance = analytic;
  report.sampled_variance = sampled;
  report.replicates = replicates;
  report.standard_error = sampled * std::sqrt(2.0 / (replicates - 1));
  return report;
}

void check_replicates(int replicates) {
  if (replicates < 2) fail(ErrorKind::validation, "need at least 2 replicates", "analysis.replicates");
}

/// Complex amplitude A with s(t) ~ Re(A e^{j w t}) by least squares.
std::complex<double> fit_sinusoid(const std::vector<double>& t, const std::vector<double>& s,
                                  double omega) {
  double cc = 0, ss = 0, cs = 0, cy = 0, sy = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double c = std::cos(omega * t[n]);
    const double si = std::sin(omega * t[n]);
    cc += c * c;
    ss += si * si;
    cs += c * si;
    cy += c * s[n];
    sy += si * s[n];
  }
  const double det = cc * ss - cs * cs;
  if (ss <= 1e-9 * static_cast<double>(t.size()) || std::abs(det) <= 1e-12 * cc * ss) {
    // sin column vanishes (w = 0 or pi): only the cosine amplitude is defined.
    return {cy / cc, 0.0};
  }
  const double a = (cy * ss - sy * cs) / det;
  const double b = (sy * cc - cy * cs) / det;
  return {a, -b};
}

double gain_of(Scheme scheme, double parameter, double omega) {
  switch (scheme) {
    case Scheme::spatial_exponential:
      return h_exp(Rate(parameter), omega);
    case Scheme::spatial_window:
      return std::abs(h_window(HalfWidth(static_cast<int>(parameter)), omega));
    case Scheme::temporal_exponential:
      return std::abs(k_temporal_exp_response(Rate(parameter), omega));
    case Scheme::temporal_window:
      return std::abs(k_temporal_window_response(HalfWidth(static_cast<int>(parameter)), omega));
  }
  fail(ErrorKind::internal, "unknown scheme");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double h_exp(Rate rho, double omega) {
  const double r = rho.value();
  // 1 + r^2 - 2r cos w written as (1-r)^2 + 4r sin^2(w/2): exact at w = 0.
  const double s = std::sin(omega / 2.0);
  return (1.0 - r) * (1.0 - r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
}

std::complex<double> h_exp_z(Rate rho, std::complex<double> z) {
  const double r = rho.value();
  return (1.0 - r) * (1.0 - r) / ((1.0 - r / z) * (1.0 - r * z));
}

double h_window(HalfWidth L, double omega) {
  const double half = std::sin(omega / 2.0);
  if (std::abs(half) < 1e-12) {
    // limit: cos((L+1/2) w) (L+1/2) / ((2L+1) cos(w/2) / 2) -> +-1
    const double sign = std::cos((L.value() + 0.5) * omega) * std::cos(omega / 2.0);
    return sign >= 0.0 ? 1.0 : -1.0;
  }
  return std::sin((L.value() + 0.5) * omega) / (L.length() * half);
}

std::complex<double> k_temporal_exp_response(Rate rho, double omega) {
  const double r = rho.value();
  const std::complex<double> e1 = std::polar(1.0, -omega);
  const std::complex<double> denom = (1.0 - r * e1) * (1.0 - r * e1);
  return rho.scale() * (1.0 - r * r * e1 * e1) / denom;
}

TransferSample k_temporal_exp(Rate rho, double omega) {
  const auto k = k_temporal_exp_response(rho, omega);
  return {omega, std::abs(k), std::arg(k)};
}

std::complex<double> k_temporal_window_response(HalfWidth L, double omega) {
  std::complex<double> sum = 1.0;
  for (int m = 1; m <= L.value(); ++m) sum += 2.0 * std::polar(1.0, -m * omega);
  return sum / static_cast<double>(L.length());
}

TransferSample k_temporal_window(HalfWidth L, double omega) {
  const auto k = k_temporal_window_response(L, omega);
  return {omega, std::abs(k), std::arg(k)};
}

Bandwidth bandwidth(Scheme scheme, double parameter) {
  Bandwidth result;
  switch (scheme) {
    case Scheme::spatial_exponential:
    case Scheme::temporal_exponential:
      result.rule_of_thumb = 1.0 - Rate(parameter).value();
      break;
    case Scheme::spatial_window:
    case Scheme::temporal_window: {
      if (parameter != std::floor(parameter)) {
        fail(ErrorKind::validation, "window half-width must be an integer");
      }
      const double L = HalfWidth(static_cast<int>(parameter)).value();
      result.rule_of_thumb = (scheme == Scheme::spatial_window ? 1.7 : 4.0) / (L + 0.5);
      break;
    }
  }
  constexpr int kGrid = 20000;
  double lo = 0.0;
  for (int m = 1; m <= kGrid; ++m) {
    const double w = kPi * m / kGrid;
    if (gain_of(scheme, parameter, w) <= 0.5) {
      double hi = w;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (gain_of(scheme, parameter, mid) > 0.5 ? lo : hi) = mid;
      }
      result.root = 0.5 * (lo + hi);
      return result;
    }
    lo = w;
  }
  result.saturated = true;
  return result;
}

double noise_var_exp(Rate rho, double sigma2) {
  const double r = rho.value();
  return (1.0 - r) * (1.0 + r * r) / ((1.0 + r) * (1.0 + r) * (1.0 + r)) * sigma2;
}

double noise_var_window(HalfWidth L, double sigma2) { return sigma2 / L.length(); }

double noise_var_global(long N, double sigma2) {
  if (N < 1) fail(ErrorKind::validation, "global average needs N >= 1", "analysis.global_n");
  return sigma2 / static_cast<double>(N);
}

VarianceMatch variance_match_rho(int L) {
  if (L < 2) {
    fail(ErrorKind::out_of_domain, "variance match needs L >= 2 (L = 1 gives a negative rate)",
         "algorithm.L");
  }
  const double l = L;
  VarianceMatch match;
  match.rho = (2.0 * l - 3.0) / (2.0 * l + 1.0);
  match.exp_variance = (4.0 * l * l - 4.0 * l + 5.0) / std::pow(2.0 * l - 1.0, 3);
  match.window_variance = 1.0 / (2.0 * l + 1.0);
  return match;
}

GainMeasurement measure_gain(const ConsensusTrace& trace, const AlgorithmSpec& algorithm,
                             const MeasurementField& field, double omega, GainMode mode,
                             Round settle) {
  if (settle < 0 || settle > trace.rounds) {
    fail(ErrorKind::validation, "settle must lie within the simulated rounds", "analysis.settle");
  }
  GainMeasurement out;
  // Settling horizon per scheme.
  std::visit(overloaded{
                 [&](const algorithms::Exponential& a) {
                   if (std::pow(a.rho.value(), settle) >= 1e-9) out.warnings.push_back("rho^settle >= 1e-9");
                 },
                 [&](const algorithms::DynExponential& a) {
                   if (std::pow(a.rho.value(), settle) >= 1e-9) out.warnings.push_back("rho^settle >= 1e-9");
                 },
                 [&](const algorithms::Asymmetric& a) {
                   const double r = std::max(a.rho_backward.value(), a.rho_forward.value());
                   if (std::pow(r, settle) >= 1e-9) out.warnings.push_back("rho^settle >= 1e-9");
                 },
                 [&](const algorithms::Window& a) {
                   if (settle < a.L.value()) out.warnings.push_back("settle < L");
                 },
                 [&](const algorithms::VariableWindow&) {
                   if (settle < max_half_width(algorithm)) out.warnings.push_back("settle < max L_i");
                 },
                 [&](const algorithms::Arbitrary& a) {
                   if (settle < a.table.radius()) out.warnings.push_back("settle < radius");
                 },
                 [&](const algorithms::DynWindow& a) {
                   if (settle <= a.L.value()) out.warnings.push_back("settle <= L");
                 },
             },
             algorithm);

  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  if (mode == GainMode::spatial) {
    if (!std::holds_alternative<fields::SpatialCosine>(field.kind())) {
      fail(ErrorKind::validation, "spatial gain needs a spatial cosine field", "field.kind");
    }
    if (!trace.chain.is_ring()) {
      fail(ErrorKind::validation, "spatial gain needs a ring", "chain.boundary");
    }
    const double harmonic = omega * static_cast<double>(trace.sensors) / (2.0 * kPi);
    if (std::abs(harmonic - std::round(harmonic)) > 1e-9) {
      fail(ErrorKind::validation, "omega is not a harmonic 2 pi m / n of the ring", "field.omega");
    }
    const Round k_field = is_dynamic(algorithm) ? settle : 0;
    for (Sensor i = 0; i < trace.sensors; ++i) {
      t.push_back(static_cast<double>(i));
      x.push_back(evaluate_field(field, i, k_field));
      y.push_back(trace.at(i, settle));
    }
    const auto ax = fit_sinusoid(t, x, omega);
    const auto ay = fit_sinusoid(t, y, omega);
    const auto ratio = ay / ax;
    out.gain = std::abs(ratio);
    out.phase = std::arg(ratio);
    return out;
  }

  if (!std::holds_alternative<fields::TemporalCosine>(field.kind())) {
    fail(ErrorKind::validation, "temporal gain needs a temporal cosine field", "field.kind");
  }
  if (!is_dynamic(algorithm)) {
    fail(ErrorKind::validation, "temporal gain needs a time-varying algorithm", "algorithm.variant");
  }
  if (trace.rounds - settle < 2) {
    fail(ErrorKind::validation, "temporal gain needs at least 3 rounds after settle",
         "analysis.settle");
  }
  std::complex<double> total = 0.0;
  for (Sensor i = 0; i < trace.sensors; ++i) {
    t.clear();
    x.clear();
    y.clear();
    for (Round k = settle; k <= trace.rounds; ++k) {
      t.push_back(static_cast<double>(k));
      x.push_back(evaluate_field(field, i, k));
      y.push_back(trace.at(i, k));
    }
    total += fit_sinusoid(t, y, omega) / fit_sinusoid(t, x, omega);
  }
  const auto ratio = total / static_cast<double>(trace.sensors);
  out.gain = std::abs(ratio);
  out.phase = std::arg(ratio);
  return out;
}

std::string NoiseReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["analytic_variance"] = analytic_variance;
  j["sampled_variance"] = sampled_variance;
  j["replicates"] = replicates;
  j["standard_error"] = standard_error;
  return j.dump(2);
}

double analytic_noise_variance(const AlgorithmSpec& algorithm, double sigma2, Sensor i) {
  return std::visit(
      overloaded{
          [&](const algorithms::Exponential& a) { return noise_var_exp(a.rho, sigma2); },
          [&](const algorithms::DynExponential& a) { return noise_var_exp(a.rho, sigma2); },
          [&](const algorithms::Asymmetric& a) {
            const double b = a.rho_backward.value();
            const double f = a.rho_forward.value();
            const double scale = (1.0 - b) * (1.0 - f) / (1.0 - b * f);
            return scale * scale * (1.0 + b * b / (1.0 - b * b) + f * f / (1.0 - f * f)) * sigma2;
          },
          [&](const algorithms::Window& a) { return noise_var_window(a.L, sigma2); },
          [&](const algorithms::DynWindow& a) { return noise_var_window(a.L, sigma2); },
          [&](const algorithms::VariableWindow& a) {
            const auto n = static_cast<Sensor>(a.L.size());
            auto at = [&](Sensor j) { return a.L[static_cast<std::size_t>(((j % n) + n) % n)]; };
            double sum = 0.0;
            for (Sensor j = i - at(i); j <= i + at(i); ++j) {
              const double w = 1.0 / (2.0 * at(j) + 1.0);
              sum += w * w;
            }
            return sum * sigma2;
          },
          [&](const algorithms::Arbitrary& a) {
            double sum = 0.0;
            for (int j = -a.table.radius(); j <= a.table.radius(); ++j) {
              const double w = a.table.at(i, j) / a.table.K();
              sum += w * w;
            }
            return sum * sigma2;
          },
      },
      algorithm);
}

NoiseReport monte_carlo_noise(const ChainConfig& chain, const AlgorithmSpec& algorithm,
                              double sigma, int replicates, std::uint64_t master_seed,
                              NoiseDistribution distribution) {
  check_replicates(replicates);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::validation, "sigma must be finite and >= 0", "analysis.sigma");
  }
  validate_run(chain, algorithm);
  const auto n = static_cast<std::size_t>(chain.n);
  std::vector<double> finals(static_cast<std::size_t>(replicates) * n);
  for_each_index(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    const MeasurementField field(fields::Constant{1.0},
                                 NoiseSpec{sigma, distribution, rng::derive(master_seed, r)});
    const auto trace = run(chain, field, algorithm, RunOptions{false});
    for (std::size_t i = 0; i < n; ++i) finals[r * n + i] = trace.at(static_cast<Sensor>(i), chain.rounds);
  });
  double sampled = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Moments m;
    for (std::size_t r = 0; r < static_cast<std::size_t>(replicates); ++r) m.add(finals[r * n + i]);
    sampled += m.variance();
  }
  sampled /= static_cast<double>(n);
  double analytic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    analytic += analytic_noise_variance(algorithm, sigma * sigma, static_cast<Sensor>(i));
  }
  return make_report(analytic / static_cast<double>(n), sampled, replicates);
}

NoiseReport monte_carlo_noise_global(long N, double sigma, int replicates,
                                     std::uint64_t master_seed, NoiseDistribution distribution) {
  check_replicates(replicates);
  const double analytic = noise_var_global(N, sigma * sigma);
  std::vector<double> means(static_cast<std::size_t>(replicates));
  for_each_index(means.size(), [&](std::size_t r) {
    const std::uint64_t seed = rng::derive(master_seed, r);
    double sum = 0.0;
    for (long i = 0; i < N; ++i) sum += 1.0 + sigma * unit_noise(seed, static_cast<std::uint64_t>(i), distribution);
    means[r] = sum / static_cast<double>(N);
  });
  Moments m;
  for (double v : means) m.add(v);
  return make_report(analytic, m.variance(), replicates);
}

}  // namespace lac
