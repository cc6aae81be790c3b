#include "lac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lac::oracle {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Sensor wrap(Sensor j, Sensor n) { return ((j % n) + n) % n; }

double read(const MeasurementField& field, Sensor j, Round k, const Domain& d) {
  if (d.periodic) return evaluate_field(field, wrap(j, d.n), k);
  if (j < 0 || j >= d.n) return 0.0;
  return evaluate_field(field, j, k);
}

void check_sensor(Sensor i, const Domain& d) {
  if (d.n < 1) fail(ErrorKind::validation, "oracle domain has no sensors");
  if (i < 0 || i >= d.n) {
    fail(ErrorKind::out_of_domain, "sensor " + std::to_string(i) + " outside [0, n)");
  }
}

void check_round(Round k) {
  if (k < 0) fail(ErrorKind::validation, "round must be >= 0");
}

Round rounds_for_tolerance(Rate rho, double bound, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorKind::validation, "tail tolerance must be > 0");
  if (!std::isfinite(bound)) {
    fail(ErrorKind::validation, "tail tolerance needs a finite measurement bound");
  }
  const double r = rho.value();
  // tail(k) = lambda * 2M r^{k+1} / (1 - r) <= epsilon
  const double head = rho.scale() * 2.0 * bound / (1.0 - r);
  if (head <= epsilon) return 0;
  const double k = std::ceil(std::log(epsilon / head) / std::log(r)) - 1.0;
  return static_cast<Round>(std::max(0.0, k));
}

}  // namespace

Domain Domain::from(const ChainConfig& chain) {
  if (std::holds_alternative<boundaries::Truncated>(chain.boundary)) {
    fail(ErrorKind::validation, "a truncated chain has no closed-form target", "chain.boundary");
  }
  return {chain.n, chain.is_ring()};
}

Value exp_target(const MeasurementField& field, Sensor i, Rate rho, Truncation truncation,
                 const Domain& domain) {
  check_sensor(i, domain);
  const Round k = std::visit(
      overloaded{[](RoundLimit r) { return r.k; },
                 [&](TailTolerance t) { return rounds_for_tolerance(rho, field.bound(), t.epsilon); }},
      truncation);
  check_round(k);
  const double r = rho.value();
  double sum = read(field, i, 0, domain);
  double power = 1.0;
  for (Round j = 1; j <= k; ++j) {
    power *= r;
    sum += power * (read(field, i - j, 0, domain) + read(field, i + j, 0, domain));
  }
  const double tail = rho.scale() * 2.0 * field.bound() * power * r / (1.0 - r);
  return {rho.scale() * sum, tail};
}

double asym_target(const MeasurementField& field, Sensor i, Rate rho_backward,
                   Rate rho_forward, Round k, const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  const double b = rho_backward.value();
  const double f = rho_forward.value();
  double sum = read(field, i, 0, domain);
  double pb = 1.0;
  double pf = 1.0;
  for (Round j = 1; j <= k; ++j) {
    pb *= b;
    pf *= f;
    sum += pb * read(field, i - j, 0, domain) + pf * read(field, i + j, 0, domain);
  }
  return (1.0 - b) * (1.0 - f) / (1.0 - b * f) * sum;
}

double window_target(const MeasurementField& field, Sensor i, HalfWidth L,
                     const Domain& domain) {
  if (domain.periodic && domain.n < L.length()) {
    fail(ErrorKind::validation, "ring shorter than the window 2L+1", "chain.n");
  }
  return window_partial_target(field, i, L, L.value(), domain);
}

double window_partial_target(const MeasurementField& field, Sensor i, HalfWidth L, Round k,
                             const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  const Round reach = std::min(k, L.value());
  double sum = 0.0;
  for (Sensor j = i - reach; j <= i + reach; ++j) sum += read(field, j, 0, domain);
  return sum / L.length();
}

double variable_window_target(const MeasurementField& field, Sensor i,
                              const std::vector<int>& L, Round k, const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  if (static_cast<Sensor>(L.size()) != domain.n) {
    fail(ErrorKind::validation, "window profile length must equal the sensor count");
  }
  auto half_width = [&](Sensor j) {
    const Sensor idx = domain.periodic ? wrap(j, domain.n) : std::clamp<Sensor>(j, 0, domain.n - 1);
    return L[static_cast<std::size_t>(idx)];
  };
  const Round reach = std::min<Round>(k, half_width(i));
  double sum = 0.0;
  for (Sensor j = i - reach; j <= i + reach; ++j) {
    sum += read(field, j, 0, domain) / (2.0 * half_width(j) + 1.0);
  }
  return sum;
}

double arbitrary_target(const MeasurementField& field, Sensor i, const WeightTable& table,
                        Round k, const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  const int reach = std::min(k, table.radius());
  double sum = 0.0;
  for (int j = -reach; j <= reach; ++j) sum += table.at(i, j) * read(field, i + j, 0, domain);
  return sum / table.K();
}

double dyn_exp_target(const MeasurementField& field, Sensor i, Round k, Rate rho,
                      const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  const double r = rho.value();
  double sum = read(field, i, k, domain);
  double power = 1.0;
  for (Round j = 1; j <= k; ++j) {
    power *= r;
    sum += power * (read(field, i - j, k - j, domain) + read(field, i + j, k - j, domain));
  }
  return rho.scale() * sum;
}

double dyn_window_target(const MeasurementField& field, Sensor i, Round k, HalfWidth L,
                         const Domain& domain) {
  check_sensor(i, domain);
  check_round(k);
  const Round reach = std::min(k, L.value());
  double sum = read(field, i, k, domain);
  for (Round j = 1; j <= reach; ++j) {
    sum += read(field, i - j, k - j, domain) + read(field, i + j, k - j, domain);
  }
  return sum / L.length();
}

double target(const AlgorithmSpec& algorithm, const MeasurementField& field, Sensor i,
              Round k, const Domain& domain) {
  return std::visit(
      overloaded{
          [&](const algorithms::Exponential& a) {
            return exp_target(field, i, a.rho, RoundLimit{k}, domain).value;
          },
          [&](const algorithms::Asymmetric& a) {
            return asym_target(field, i, a.rho_backward, a.rho_forward, k, domain);
          },
          [&](const algorithms::Window& a) {
            return window_partial_target(field, i, a.L, k, domain);
          },
          [&](const algorithms::VariableWindow& a) {
            return variable_window_target(field, i, a.L, k, domain);
          },
          [&](const algorithms::Arbitrary& a) {
            return arbitrary_target(field, i, a.table, k, domain);
          },
          [&](const algorithms::DynExponential& a) {
            return dyn_exp_target(field, i, k, a.rho, domain);
          },
          [&](const algorithms::DynWindow& a) {
            return dyn_window_target(field, i, k, a.L, domain);
          },
      },
      algorithm);
}

}  // namespace lac::oracle
