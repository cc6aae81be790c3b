#include "lac/field.hpp"

#include <cmath>
#include <string>

#include "lac/error.hpp"
#include "lac/rng.hpp"

namespace lac {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    fail(ErrorKind::validation, std::string("field parameter '") + what + "' is not finite");
  }
}

double term_value(const MeasurementField& field, Sensor i, Round k);

double kind_value(const FieldKind& kind, Sensor i, Round k) {
  return std::visit(
      overloaded{
          [](const fields::Constant& c) { return c.value; },
          [&](const fields::Impulse& p) { return i == p.center ? p.height : 0.0; },
          [&](const fields::SpatialCosine& c) {
            return c.amplitude * std::cos(c.omega * static_cast<double>(i) + c.phase);
          },
          [&](const fields::TemporalCosine& c) {
            return c.amplitude * std::cos(c.omega * static_cast<double>(k) + c.phase);
          },
          [&](const fields::Table& t) {
            if (i < 0 || i >= t.sensors) {
              fail(ErrorKind::out_of_domain,
                   "table field has no sensor " + std::to_string(i));
            }
            const std::size_t row = t.time_invariant ? 0 : static_cast<std::size_t>(k);
            if (k < 0 || row >= t.rows.size()) {
              fail(ErrorKind::out_of_domain, "table field has no round " + std::to_string(k));
            }
            return t.rows[row][static_cast<std::size_t>(i)];
          },
          [&](const fields::Sum& s) {
            double total = 0.0;
            for (const auto& term : s.terms) total += term_value(term, i, k);
            return total;
          },
      },
      kind);
}

double noise_value(const NoiseSpec& noise, Sensor i, Round k) {
  const auto a = static_cast<std::uint64_t>(i);
  const auto b = static_cast<std::uint64_t>(k);
  switch (noise.distribution) {
    case NoiseDistribution::gaussian:
      return noise.sigma * rng::normal(noise.seed, a, b);
    case NoiseDistribution::uniform:
      return noise.sigma * std::sqrt(3.0) * (2.0 * rng::uniform(noise.seed, a, b) - 1.0);
  }
  return 0.0;
}

// Term values including each term's own noise.
double term_value(const MeasurementField& field, Sensor i, Round k) {
  double value = kind_value(field.kind(), i, k);
  if (field.noise() && field.noise()->sigma != 0.0) value += noise_value(*field.noise(), i, k);
  return value;
}

}  // namespace

bool MeasurementField::time_invariant() const {
  return std::visit(overloaded{
                        [](const fields::TemporalCosine& c) { return c.omega == 0.0; },
                        [](const fields::Table& t) { return t.time_invariant || t.rows.size() <= 1; },
                        [](const fields::Sum& s) {
                          for (const auto& term : s.terms) {
                            if (!term.time_invariant()) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

void MeasurementField::validate() const {
  if (!(bound_ > 0.0)) fail(ErrorKind::validation, "field bound must be positive");
  std::visit(overloaded{
                 [](const fields::Constant& c) { require_finite(c.value, "value"); },
                 [](const fields::Impulse& p) { require_finite(p.height, "height"); },
                 [](const fields::SpatialCosine& c) {
                   require_finite(c.amplitude, "amplitude");
                   require_finite(c.omega, "omega");
                   require_finite(c.phase, "phase");
                 },
                 [](const fields::TemporalCosine& c) {
                   require_finite(c.amplitude, "amplitude");
                   require_finite(c.omega, "omega");
                   require_finite(c.phase, "phase");
                 },
                 [](const fields::Table& t) {
                   if (t.sensors <= 0) fail(ErrorKind::validation, "table field has no sensors");
                   if (t.rows.empty()) fail(ErrorKind::validation, "table field has no rows");
                   for (const auto& row : t.rows) {
                     if (static_cast<Sensor>(row.size()) != t.sensors) {
                       fail(ErrorKind::validation, "table field row has wrong length");
                     }
                     for (double v : row) require_finite(v, "table value");
                   }
                 },
                 [](const fields::Sum& s) {
                   for (const auto& term : s.terms) term.validate();
                 },
             },
             kind_);
  if (noise_) {
    require_finite(noise_->sigma, "sigma");
    if (noise_->sigma < 0.0) fail(ErrorKind::validation, "noise sigma must be >= 0");
  }
}

double evaluate_field(const MeasurementField& field, Sensor i, Round k) {
  const double value = term_value(field, i, k);
  if (!std::isfinite(value) || std::abs(value) >= field.bound()) {
    fail(ErrorKind::out_of_domain, "field value at sensor " + std::to_string(i) + ", round " +
                                       std::to_string(k) + " violates bound " +
                                       std::to_string(field.bound()));
  }
  return value;
}

MeasurementField static_table(std::vector<double> values, double bound) {
  fields::Table table;
  table.sensors = static_cast<Sensor>(values.size());
  table.rows.push_back(std::move(values));
  table.time_invariant = true;
  return MeasurementField(std::move(table), std::nullopt, bound);
}

}  // namespace lac
