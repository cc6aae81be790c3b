#include "lac/random_spacing.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lac/parallel.hpp"
#include "lac/rng.hpp"

namespace lac {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::uint64_t zigzag(Sensor i) {
  return i >= 0 ? static_cast<std::uint64_t>(i) * 2 : static_cast<std::uint64_t>(-i) * 2 - 1;
}

double draw_gap(const SpacingLaw& law, std::uint64_t seed, Sensor left) {
  const double u = rng::to_unit(rng::derive(seed, zigzag(left)));
  return std::visit(overloaded{[&](spacing::ExpDensity) { return -std::log(u); },
                               [&](spacing::Uniform l) { return 1.0 - l.eta + 2.0 * l.eta * u; }},
                    law);
}

/// E[rho^d] under the law, evaluated at log-rate `lr` = log(rho^p).
double laplace(double lr, const SpacingLaw& law) {
  return std::visit(overloaded{[&](spacing::ExpDensity) { return 1.0 / (1.0 - lr); },
                               [&](spacing::Uniform l) {
                                 const double e = l.eta;
                                 return (std::exp(lr * (1.0 + e)) - std::exp(lr * (1.0 - e))) /
                                        (2.0 * e * lr);
                               }},
                    law);
}

}  // namespace

std::string spacing_law_name(const SpacingLaw& law) {
  return std::holds_alternative<spacing::ExpDensity>(law) ? "exp_density" : "uniform";
}

void validate(const SpacingLaw& law) {
  if (const auto* u = std::get_if<spacing::Uniform>(&law)) {
    if (!(u->eta > 0.0 && u->eta < 1.0)) {
      fail(ErrorKind::validation, "uniform spacing needs eta in (0,1)", "analysis.eta");
    }
  }
}

SpacingDraw::SpacingDraw(std::vector<double> gaps) : gaps_(std::move(gaps)) {
  if (gaps_.size() % 2 != 0) fail(ErrorKind::validation, "a spacing draw needs an even gap count");
  for (double g : gaps_) {
    if (!(g > 0.0) || !std::isfinite(g)) fail(ErrorKind::validation, "spacing gaps must be positive");
  }
}

SpacingDraw SpacingDraw::unit(Sensor half_count) {
  return SpacingDraw(std::vector<double>(static_cast<std::size_t>(2 * half_count), 1.0));
}

double SpacingDraw::gap(Sensor i) const {
  if (i < first_sensor() || i >= last_sensor()) {
    fail(ErrorKind::needs_more_sensors, "no gap after sensor " + std::to_string(i));
  }
  return gaps_[static_cast<std::size_t>(i + half_count())];
}

double SpacingDraw::distance(Sensor i, Sensor j) const {
  const Sensor a = std::min(i, j);
  const Sensor b = std::max(i, j);
  if (a < first_sensor() || b > last_sensor()) {
    fail(ErrorKind::needs_more_sensors,
         "sensors " + std::to_string(a) + ".." + std::to_string(b) + " outside the draw");
  }
  const auto begin = gaps_.begin() + (a + half_count());
  return std::accumulate(begin, begin + (b - a), 0.0);
}

SpacingDraw sample_spacings(const SpacingLaw& law, Sensor half_count, std::uint64_t seed) {
  validate(law);
  if (half_count < 1) fail(ErrorKind::validation, "spacing draw needs at least one gap each side");
  std::vector<double> gaps(static_cast<std::size_t>(2 * half_count));
  for (Sensor left = -half_count; left < half_count; ++left) {
    gaps[static_cast<std::size_t>(left + half_count)] = draw_gap(law, seed, left);
  }
  return SpacingDraw(std::move(gaps));
}

double expected_xi(Rate rho, const SpacingLaw& law) {
  validate(law);
  return laplace(std::log(rho.value()), law);
}

double expected_xi_squared(Rate rho, const SpacingLaw& law) {
  validate(law);
  return laplace(2.0 * std::log(rho.value()), law);
}

double k_poisson(Rate rho) {
  const double l = std::log(rho.value());
  return -l / (2.0 - l);
}

double k_uniform(Rate rho, double eta) {
  validate(spacing::Uniform{eta});
  const double l = std::log(rho.value());
  const double r = rho.value();
  const double diff = std::pow(r, 1.0 + eta) - std::pow(r, 1.0 - eta);
  return (2.0 * eta * l - diff) / (2.0 * eta * l + diff);
}

double k_for(Rate rho, const SpacingLaw& law) {
  return std::visit(overloaded{[&](spacing::ExpDensity) { return k_poisson(rho); },
                               [&](spacing::Uniform u) { return k_uniform(rho, u.eta); }},
                    law);
}

SpacingMoments spacing_moments(Rate rho) {
  const double l = std::log(rho.value());
  SpacingMoments m;
  m.K = k_poisson(rho);
  m.E_xi = 1.0 / (1.0 - l);
  m.E_xi2 = 1.0 / (1.0 - 2.0 * l);
  m.var_xi = m.E_xi2 - m.E_xi * m.E_xi;
  m.E_u = 1.0 / (1.0 - m.E_xi);
  m.var_u = -1.0 / (2.0 * l);
  m.var_y = -l / ((2.0 - l) * (2.0 - l));
  return m;
}

SpacingMoments spacing_moments(Rate rho, const SpacingLaw& law) {
  SpacingMoments m;
  m.K = k_for(rho, law);
  m.E_xi = expected_xi(rho, law);
  m.E_xi2 = expected_xi_squared(rho, law);
  m.var_xi = m.E_xi2 - m.E_xi * m.E_xi;
  // u = 1 + xi u' with u' an independent copy of u.
  m.E_u = 1.0 / (1.0 - m.E_xi);
  m.var_u = m.var_xi * m.E_u * m.E_u / (1.0 - m.E_xi2);
  m.var_y = 2.0 * m.K * m.K * m.var_u;
  return m;
}

double weighted_target(const SpacingDraw& draw, const MeasurementField& field, Sensor i,
                       Rate rho, double K, double tail_eps) {
  if (!(tail_eps > 0.0)) fail(ErrorKind::validation, "tail tolerance must be > 0", "analysis.tail_eps");
  if (i < draw.first_sensor() || i > draw.last_sensor()) {
    fail(ErrorKind::out_of_domain, "sensor outside the draw");
  }
  const double log_rho = std::log(rho.value());
  double sum = evaluate_field(field, i, 0);
  for (int direction : {+1, -1}) {
    double d = 0.0;
    for (Sensor j = i;;) {
      const Sensor next = j + direction;
      if (next < draw.first_sensor() || next > draw.last_sensor()) {
        const double weight = std::exp(log_rho * d);
        const auto more = static_cast<Sensor>(std::ceil(std::log(tail_eps / weight) / log_rho));
        fail(ErrorKind::needs_more_sensors,
             "spacing draw too short: weight " + fmt::format("{:.3g}", weight) + " at sensor " +
                 std::to_string(j) + "; need about " + std::to_string(draw.half_count() + more) +
                 " sensors each side",
             "analysis.tail_eps");
      }
      d += direction > 0 ? draw.gap(j) : draw.gap(next);
      const double weight = std::exp(log_rho * d);
      if (weight < tail_eps) break;
      sum += weight * evaluate_field(field, next, 0);
      j = next;
    }
  }
  return K * sum;
}

std::string SpacingReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["rho"] = rho;
  j["law"] = law;
  j["K_analytic"] = K_analytic;
  j["mean"] = mean;
  j["mean_se"] = mean_se;
  j["var_analytic"] = var_analytic;
  j["var_sampled"] = var_sampled;
  j["var_se"] = var_se;
  j["replicates"] = replicates;
  return j.dump(2);
}

SpacingReport monte_carlo_spacing(Rate rho, const SpacingLaw& law, int replicates,
                                  std::uint64_t seed, double tail_eps) {
  validate(law);
  if (replicates < 2) fail(ErrorKind::validation, "need at least 2 replicates", "analysis.replicates");
  const SpacingMoments moments = spacing_moments(rho, law);
  const MeasurementField ones(fields::Constant{1.0});
  // Expected sensors to reach tail_eps, with slack; grown on demand.
  const double per_hop = -std::log(moments.E_xi);
  const auto start = static_cast<Sensor>(std::ceil(-std::log(tail_eps) / per_hop * 1.5)) + 16;

  std::vector<double> values(static_cast<std::size_t>(replicates));
  for_each_index(values.size(), [&](std::size_t r) {
    const std::uint64_t s = rng::derive(seed, r);
    for (Sensor m = start;; m *= 2) {
      try {
        values[r] = weighted_target(sample_spacings(law, m, s), ones, 0, rho, moments.K, tail_eps);
        return;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::needs_more_sensors || m > (Sensor{1} << 30)) throw;
      }
    }
  });

  const double n = replicates;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;

  SpacingReport report;
  report.rho = rho.value();
  report.law = spacing_law_name(law);
  report.K_analytic = moments.K;
  report.mean = mean;
  report.mean_se = std::sqrt(var / n);
  report.var_analytic = moments.var_y;
  report.var_sampled = var;
  report.var_se = std::sqrt(std::max(0.0, (m4 - var * var * (n - 3.0) / (n - 1.0)) / n));
  report.replicates = replicates;
  return report;
}

WeightTable spacing_weight_table(const SpacingDraw& draw, Sensor sensors, Rate rho,
                                 int radius) {
  const Sensor offset = sensors / 2;
  if (-offset - radius < draw.first_sensor() || sensors - 1 - offset + radius > draw.last_sensor()) {
    fail(ErrorKind::needs_more_sensors,
         "spacing draw must cover " + std::to_string(sensors) + " sensors plus radius " +
             std::to_string(radius));
  }
  WeightTable table(sensors, radius, 1.0);
  for (Sensor s = 0; s < sensors; ++s) {
    const Sensor d = s - offset;
    for (int j = -radius; j <= radius; ++j) {
      table.set(s, j, std::pow(rho.value(), draw.distance(d, d + j)));
    }
  }
  return table;
}

double normalize_raw_sum(double raw, Normalization mode, double analytic_K, double row_sum) {
  switch (mode) {
    case Normalization::none:
      return raw;
    case Normalization::analytic:
      return analytic_K * raw;
    case Normalization::row_sums:
      if (row_sum == 0.0) fail(ErrorKind::validation, "row sum is zero");
      return raw / row_sum;
  }
  fail(ErrorKind::internal, "unknown normalization");
}

}  // namespace lac
