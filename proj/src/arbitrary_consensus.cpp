#include "lac/arbitrary_consensus.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace lac {

WeightTable::WeightTable(Sensor sensors, int radius, double K)
    : sensors_(sensors), radius_(radius), K_(K) {
  if (sensors <= 0) fail(ErrorKind::validation, "weight table needs at least one sensor");
  if (radius < 0) fail(ErrorKind::validation, "weight table radius must be >= 0");
  if (!std::isfinite(K) || K == 0.0) fail(ErrorKind::validation, "weight table K must be finite and nonzero");
  weights_.assign(static_cast<std::size_t>(sensors) * (2 * radius + 1), 0.0);
}

WeightTable WeightTable::geometric(Sensor sensors, Rate rho, int radius) {
  WeightTable table(sensors, radius, (1.0 + rho.value()) / (1.0 - rho.value()));
  for (Sensor i = 0; i < sensors; ++i) {
    for (int j = -radius; j <= radius; ++j) table.set(i, j, std::pow(rho.value(), std::abs(j)));
  }
  return table;
}

WeightTable WeightTable::read_csv(std::istream& in, double K) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::validation, "weight CSV is empty");
  if (line.rfind("sensor,offset,weight", 0) != 0) {
    fail(ErrorKind::validation, "weight CSV header must be 'sensor,offset,weight'");
  }
  std::map<std::pair<Sensor, int>, double> entries;
  Sensor max_sensor = -1;
  int radius = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string s, o, w;
    if (!std::getline(fields, s, ',') || !std::getline(fields, o, ',') ||
        !std::getline(fields, w)) {
      fail(ErrorKind::validation, "weight CSV line " + std::to_string(line_no) + " is malformed");
    }
    try {
      const Sensor sensor = std::stol(s);
      const int offset = std::stoi(o);
      if (sensor < 0) throw std::invalid_argument("negative sensor");
      entries[{sensor, offset}] = std::stod(w);
      max_sensor = std::max(max_sensor, sensor);
      radius = std::max(radius, std::abs(offset));
    } catch (const std::exception&) {
      fail(ErrorKind::validation, "weight CSV line " + std::to_string(line_no) + " is malformed");
    }
  }
  WeightTable table(max_sensor + 1, radius, K);
  for (const auto& [key, weight] : entries) table.set(key.first, key.second, weight);
  return table;
}

void WeightTable::set(Sensor i, int offset, double weight) {
  if (i < 0 || i >= sensors_ || std::abs(offset) > radius_) {
    fail(ErrorKind::out_of_domain, "weight entry (" + std::to_string(i) + ", " +
                                       std::to_string(offset) + ") outside table");
  }
  weights_[static_cast<std::size_t>(i) * (2 * radius_ + 1) + (offset + radius_)] = weight;
}

double WeightTable::at(Sensor i, int offset) const {
  if (i < 0 || i >= sensors_ || std::abs(offset) > radius_) {
    fail(ErrorKind::out_of_domain, "weight entry (" + std::to_string(i) + ", " +
                                       std::to_string(offset) + ") outside table");
  }
  return weights_[static_cast<std::size_t>(i) * (2 * radius_ + 1) + (offset + radius_)];
}

double WeightTable::row_sum(Sensor i) const {
  double sum = at(i, 0);
  for (int j = 1; j <= radius_; ++j) sum += at(i, -j) + at(i, j);
  return sum;
}

std::string WeightReport::to_json() const {
  nlohmann::json report = {{"schema_version", 1}, {"ok", ok}, {"K", K}, {"tolerance", tolerance}};
  auto& list = report["issues"] = nlohmann::json::array();
  for (const auto& issue : issues) {
    list.push_back({{"sensor", issue.sensor},
                    {"row_sum", issue.row_sum},
                    {"zero_offsets", issue.zero_offsets}});
  }
  return report.dump(2);
}

WeightReport validate_weights(const WeightTable& table, double tol_K) {
  WeightReport report;
  report.K = table.K();
  report.tolerance = tol_K;
  for (Sensor i = 0; i < table.sensors(); ++i) {
    WeightIssue issue{i, table.row_sum(i), {}};
    for (int j = -table.radius(); j <= table.radius(); ++j) {
      if (table.at(i, j) == 0.0) issue.zero_offsets.push_back(j);
    }
    if (!issue.zero_offsets.empty() || !(std::abs(issue.row_sum - table.K()) <= tol_K)) {
      report.ok = false;
      report.issues.push_back(std::move(issue));
    }
  }
  return report;
}

FBState fb_initial(double x, const LocalWeights& weights) {
  const double v = weights.own(0) * x / weights.K();
  return {v, v};
}

FBState fb_transition(Round k, const FBState& own, const NeighborHistory& forward_neighbor,
                      const NeighborHistory& backward_neighbor, const LocalWeights& weights) {
  if (k < 0) fail(ErrorKind::contract, "transition round must be >= 0");
  if (k + 1 > weights.radius()) return own;
  // Round 0 uses the neighbor's value itself; later rounds its latest change.
  const double forward_delta =
      k == 0 ? forward_neighbor[0] : forward_neighbor[0] - forward_neighbor[1];
  const double backward_delta =
      k == 0 ? backward_neighbor[0] : backward_neighbor[0] - backward_neighbor[1];
  const double forward_coeff = weights.own(k + 1) / weights.forward(k);
  const double backward_coeff = weights.own(-(k + 1)) / weights.backward(-k);
  return {own.forward + forward_coeff * forward_delta,
          own.backward + backward_coeff * backward_delta};
}

double glue(const FBState& state, double x, const LocalWeights& weights) {
  return state.forward + state.backward - weights.own(0) * x / weights.K();
}

}  // namespace lac
