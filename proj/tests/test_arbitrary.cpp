#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "lac/arbitrary_consensus.hpp"
#include "lac/harness.hpp"
#include "support.hpp"

using namespace lac;
using lac::test::cell;

namespace {

/// Nonzero weights with K = 1, so row sums differ from K and between rows.
WeightTable random_table(Sensor n, int R, std::uint64_t seed) {
  test::Gen gen(seed);
  WeightTable table(n, R, 1.0);
  for (Sensor i = 0; i < n; ++i) {
    for (int j = -R; j <= R; ++j) table.set(i, j, gen.uniform(0.1, 1.0));
  }
  return table;
}

/// Forward/backward states of every sensor on a ring, driven directly by the
/// per-sensor transitions.
struct Driven {
  std::vector<std::vector<FBState>> states;  // [k][i]
  std::vector<std::vector<double>> y;
};

Driven drive(const WeightTable& table, const std::vector<double>& x, Round rounds) {
  const Sensor n = table.sensors();
  auto local = [&](Sensor i) {
    return LocalWeights{&table, i, test::wrap(i + 1, n), test::wrap(i - 1, n)};
  };
  Driven d;
  d.states.emplace_back();
  for (Sensor i = 0; i < n; ++i) d.states[0].push_back(fb_initial(x[i], local(i)));
  for (Round k = 0; k < rounds; ++k) {
    std::vector<FBState> next;
    for (Sensor i = 0; i < n; ++i) {
      NeighborHistory fwd;
      NeighborHistory bwd;
      if (k > 0) {
        fwd.push(d.states[k - 1][test::wrap(i + 1, n)].forward);
        bwd.push(d.states[k - 1][test::wrap(i - 1, n)].backward);
      }
      fwd.push(d.states[k][test::wrap(i + 1, n)].forward);
      bwd.push(d.states[k][test::wrap(i - 1, n)].backward);
      next.push_back(fb_transition(k, d.states[k][i], fwd, bwd, local(i)));
    }
    d.states.push_back(next);
  }
  for (Round k = 0; k <= rounds; ++k) {
    d.y.emplace_back();
    for (Sensor i = 0; i < n; ++i) d.y[k].push_back(glue(d.states[k][i], x[i], local(i)));
  }
  return d;
}

}  // namespace

TEST_CASE("geometric table holds rho^|j| and the matching K") {
  const auto t = WeightTable::geometric(10, Rate(0.5), 4);
  CHECK(t.at(3, 0) == 1.0);
  CHECK(t.at(3, -2) == 0.25);
  CHECK(t.at(3, 4) == 0.0625);
  CHECK(t.K() == doctest::Approx(3.0));
  CHECK(t.row_sum(3) == doctest::Approx(1.0 + 2.0 * (0.5 + 0.25 + 0.125 + 0.0625)));
  CHECK_THROWS_AS(t.at(3, 5), Error);
}

TEST_CASE("weight validation reports zero entries and row-sum mismatches") {
  WeightTable t(4, 1, 3.0);
  for (Sensor i = 0; i < 4; ++i) {
    for (int j = -1; j <= 1; ++j) t.set(i, j, 1.0);
  }
  CHECK(validate_weights(t, 1e-12).ok);
  t.set(2, 1, 0.0);
  const auto report = validate_weights(t, 1e-12);
  CHECK_FALSE(report.ok);
  REQUIRE(report.issues.size() == 1);
  CHECK(report.issues[0].sensor == 2);
  CHECK(report.issues[0].row_sum == doctest::Approx(2.0));
  CHECK(report.issues[0].zero_offsets == std::vector<int>{1});
  CHECK(nlohmann::json::parse(report.to_json())["ok"] == false);
}

TEST_CASE("weight CSV round-trip and malformed input") {
  std::istringstream good("sensor,offset,weight\n0,-1,0.5\n0,0,1\n0,1,0.5\n1,-1,0.5\n1,0,1\n1,1,0.5\n");
  const auto t = WeightTable::read_csv(good, 2.0);
  CHECK(t.sensors() == 2);
  CHECK(t.radius() == 1);
  CHECK(t.at(1, 1) == 0.5);
  CHECK(validate_weights(t, 1e-12).ok);
  std::istringstream sparse("sensor,offset,weight\n0,0,1\n0,2,1\n");
  CHECK_FALSE(validate_weights(WeightTable::read_csv(sparse, 2.0), 1e-9).ok);
  std::istringstream header("a,b,c\n");
  CHECK_THROWS_AS(WeightTable::read_csv(header, 1.0), Error);
  std::istringstream junk("sensor,offset,weight\n0,x,1\n");
  CHECK_THROWS_AS(WeightTable::read_csv(junk, 1.0), Error);
}

TEST_CASE("property: partial sums of arbitrary weights at every round") {
  test::Gen gen(5);
  for (int trial = 0; trial < 6; ++trial) {
    const Sensor n = gen.integer(12, 30);
    const int R = static_cast<int>(gen.integer(1, 5));
    const auto table = random_table(n, R, 50 + trial);
    const bool periodic = trial % 2 == 0;
    auto t = test::random_rows(n, 0, 70 + trial);
    t.time_invariant = true;
    const Round rounds = R + 2;
    const auto chain = periodic ? test::ring(n, rounds) : test::halo(n, rounds);
    const auto trace = run(chain, MeasurementField(t, std::nullopt, 2.0),
                           algorithms::Arbitrary{table, false, 0.0});
    for (Round k = 0; k <= rounds; ++k) {
      for (Sensor i = 0; i < n; ++i) {
        double expected = table.at(i, 0) * cell(t, i, 0, periodic);
        for (int j = 1; j <= std::min<int>(k, R); ++j) {
          expected += table.at(i, -j) * cell(t, i - j, 0, periodic) +
                      table.at(i, j) * cell(t, i + j, 0, periodic);
        }
        CHECK(std::abs(trace.at(i, k) - expected / table.K()) < 1e-12);
      }
    }
  }
}

TEST_CASE("geometric weights reproduce the exponential algorithm") {
  const Sensor n = 64;
  const int R = 20;
  const auto field = test::random_field(n, 0, 8);
  const auto table = WeightTable::geometric(n, Rate(0.8), R);
  const auto arb = run(test::ring(n, R), field, algorithms::Arbitrary{table, false, 0.0});
  const auto exp = run(test::ring(n, R), field, algorithms::Exponential{Rate(0.8)});
  for (Round k = 0; k <= R; ++k) {
    for (Sensor i = 0; i < n; ++i) CHECK(std::abs(arb.at(i, k) - exp.at(i, k)) < 1e-12);
  }
}

TEST_CASE("property: forward perturbations never reach the backward accumulator") {
  test::Gen gen(77);
  const Sensor n = 24;
  const int R = 6;
  const auto table = random_table(n, R, 3);
  std::vector<double> x(n);
  for (auto& v : x) v = gen.uniform(-1.0, 1.0);
  const auto base = drive(table, x, R + 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Sensor i = gen.integer(0, n - 1);
    const Sensor m = gen.integer(1, R);
    auto bumped = x;
    bumped[test::wrap(i + m, n)] += gen.uniform(0.5, 2.0);
    const auto moved = drive(table, bumped, R + 1);
    for (Round k = 0; k <= R + 1; ++k) {
      CHECK(moved.states[k][i].backward == base.states[k][i].backward);
      if (k >= m) CHECK(moved.states[k][i].forward != base.states[k][i].forward);
      if (k < m) CHECK(moved.states[k][i].forward == base.states[k][i].forward);
    }
  }
}

TEST_CASE("glued accumulators agree with the harness") {
  const Sensor n = 20;
  const int R = 4;
  const auto table = random_table(n, R, 12);
  const auto t = test::random_rows(n, 0, 13);
  const auto d = drive(table, t.rows[0], R);
  auto rows = t;
  rows.time_invariant = true;
  const auto trace = run(test::ring(n, R), MeasurementField(rows, std::nullopt, 2.0),
                         algorithms::Arbitrary{table, false, 0.0});
  for (Round k = 0; k <= R; ++k) {
    for (Sensor i = 0; i < n; ++i) CHECK(std::abs(d.y[k][i] - trace.at(i, k)) < 1e-15);
  }
}

TEST_CASE("row sums are enforced unless disabled") {
  const auto table = random_table(16, 2, 99);
  const auto field = MeasurementField(fields::Constant{1.0});
  try {
    run(test::ring(16, 2), field, algorithms::Arbitrary{table, true, 1e-9});
    FAIL("expected validation failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
  }
  CHECK_NOTHROW(run(test::ring(16, 2), field, algorithms::Arbitrary{table, false, 1e-9}));
  auto zero = table;
  zero.set(4, 1, 0.0);
  CHECK_THROWS_AS(run(test::ring(16, 2), field, algorithms::Arbitrary{zero, false, 1e-9}), Error);
}
