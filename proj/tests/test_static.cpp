#include <doctest.h>

#include <cmath>
#include <vector>

#include "lac/harness.hpp"
#include "lac/static_consensus.hpp"
#include "support.hpp"

using namespace lac;
using lac::test::cell;

namespace {

double brute_exp(const fields::Table& t, Sensor i, Round k, double rho, bool periodic) {
  double sum = cell(t, i, 0, periodic);
  for (Round j = 1; j <= k; ++j) {
    sum += std::pow(rho, j) * (cell(t, i - j, 0, periodic) + cell(t, i + j, 0, periodic));
  }
  return (1.0 - rho) / (1.0 + rho) * sum;
}

double brute_asym(const fields::Table& t, Sensor i, Round k, double b, double f, bool periodic) {
  double sum = cell(t, i, 0, periodic);
  for (Round j = 1; j <= k; ++j) {
    sum += std::pow(b, j) * cell(t, i - j, 0, periodic) + std::pow(f, j) * cell(t, i + j, 0, periodic);
  }
  return (1.0 - b) * (1.0 - f) / (1.0 - b * f) * sum;
}

double brute_mean(const fields::Table& t, Sensor i, int L, bool periodic) {
  double sum = 0.0;
  for (Sensor j = i - L; j <= i + L; ++j) sum += cell(t, j, 0, periodic);
  return sum / (2 * L + 1);
}

fields::Table static_rows(Sensor n, std::uint64_t seed) {
  auto t = test::random_rows(n, 0, seed);
  t.time_invariant = true;
  return t;
}

}  // namespace

TEST_CASE("stage dispatch is driven by the round index") {
  CHECK(stage_for(0) == Stage::first);
  CHECK(stage_for(1) == Stage::second);
  CHECK(stage_for(2) == Stage::general);
  CHECK(stage_for(50) == Stage::general);
}

TEST_CASE("exponential initial value scales by (1-rho)/(1+rho)") {
  CHECK(exp_initial(3.0, Rate(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Rate(0.8).scale() == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(Rate(1.0), Error);
  CHECK_THROWS_AS(Rate(0.0), Error);
  CHECK_THROWS_AS(HalfWidth(0), Error);
}

TEST_CASE("three-sensor window averages every reading") {
  const auto trace = run(test::ring(3, 1), static_table({0.0, 3.0, 6.0}),
                         algorithms::Window{HalfWidth(1)});
  for (Sensor i = 0; i < 3; ++i) CHECK(trace.at(i, 1) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("impulse response of exponential weighting decays geometrically") {
  const Sensor n = 128;
  const auto trace = run(test::ring(n, 60), MeasurementField(fields::Impulse{64}),
                         algorithms::Exponential{Rate(0.5)});
  CHECK(trace.at(64, 60) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(trace.at(63, 60) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(trace.at(66, 60) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("exponential trace equals the truncated weighted sum at every round") {
  for (bool periodic : {true, false}) {
    const auto t = static_rows(40, periodic ? 1 : 2);
    const Round rounds = 30;
    const auto chain = periodic ? test::ring(40, rounds) : test::halo(40, rounds);
    const auto trace = run(chain, MeasurementField(t, std::nullopt, 2.0),
                           algorithms::Exponential{Rate(0.7)});
    double worst = 0.0;
    for (Round k = 0; k <= rounds; ++k) {
      for (Sensor i = 0; i < 40; ++i) {
        worst = std::max(worst, std::abs(trace.at(i, k) - brute_exp(t, i, k, 0.7, periodic)));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("property: consecutive exponential rounds differ by the k-hop readings") {
  test::Gen gen(11);
  for (int trial = 0; trial < 12; ++trial) {
    const double rho = gen.uniform(0.05, 0.95);
    const Sensor n = gen.integer(9, 48);
    const bool periodic = trial % 2 == 0;
    const Round rounds = static_cast<Round>(gen.integer(3, 25));
    const auto t = static_rows(n, 100 + trial);
    const auto chain = periodic ? test::ring(n, rounds) : test::halo(n, rounds);
    const auto trace = run(chain, MeasurementField(t, std::nullopt, 2.0),
                           algorithms::Exponential{Rate(rho)});
    auto y0 = [&](Sensor j) {
      if (periodic) return trace.at(test::wrap(j, n), 0);
      return (j < 0 || j >= n) ? 0.0 : trace.at(j, 0);
    };
    for (Round k = 1; k <= rounds; ++k) {
      for (Sensor i = 0; i < n; ++i) {
        const double lhs = trace.at(i, k) - trace.at(i, k - 1);
        const double rhs = std::pow(rho, k) * (y0(i - k) + y0(i + k));
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("exponential convergence stays inside the geometric tail bound") {
  const double rho = 0.8;
  const Sensor n = 32;
  const auto t = static_rows(n, 9);
  const double M = 1.0;
  const auto trace = run(test::ring(n, 40), MeasurementField(t, std::nullopt, 2.0),
                         algorithms::Exponential{Rate(rho)});
  for (Sensor i = 0; i < n; ++i) {
    const double limit = brute_exp(t, i, 4000, rho, true);
    for (Round k = 0; k <= 40; ++k) {
      const double bound = (1 - rho) / (1 + rho) * 2 * M * std::pow(rho, k + 1) / (1 - rho);
      CHECK(std::abs(trace.at(i, k) - limit) <= bound + 1e-15);
    }
  }
}

TEST_CASE("asymmetric weighting matches its one-sided sums") {
  const Sensor n = 30;
  const auto t = static_rows(n, 4);
  const auto trace = run(test::halo(n, 20), MeasurementField(t, std::nullopt, 2.0),
                         algorithms::Asymmetric{Rate(0.5), Rate(0.25)});
  for (Round k = 0; k <= 20; ++k) {
    for (Sensor i = 0; i < n; ++i) {
      CHECK(std::abs(trace.at(i, k) - brute_asym(t, i, k, 0.5, 0.25, false)) < 1e-12);
    }
  }
  const auto ones = run(test::ring(n, 60), MeasurementField(fields::Constant{1.0}),
                        algorithms::Asymmetric{Rate(0.5), Rate(0.25)});
  CHECK(ones.at(7, 60) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("window is exact at round L and partial before") {
  for (int L : {1, 2, 5, 8}) {
    const Sensor n = 40;
    const auto t = static_rows(n, 20 + L);
    const auto trace = run(test::ring(n, L), MeasurementField(t, std::nullopt, 2.0),
                           algorithms::Window{HalfWidth(L)});
    for (Sensor i = 0; i < n; ++i) {
      CHECK(std::abs(trace.at(i, L) - brute_mean(t, i, L, true)) < 1e-12);
      for (Round k = 0; k < L; ++k) {
        CHECK(std::abs(trace.at(i, k) - brute_mean(t, i, k, true) * (2 * k + 1) / (2 * L + 1)) < 1e-12);
      }
    }
  }
}

TEST_CASE("window refuses to step past its final round") {
  OwnHistory own;
  NeighborHistory left;
  NeighborHistory right;
  for (int r = 0; r < 3; ++r) {
    own.push(0.0);
    left.push(0.0);
    right.push(0.0);
  }
  try {
    window_transition(2, own, left, right, HalfWidth(2));
    FAIL("expected termination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::terminated);
  }
  const auto frozen = run(test::ring(16, 5), test::random_field(16, 0, 3),
                          algorithms::Window{HalfWidth(2)});
  for (Sensor i = 0; i < 16; ++i) CHECK(frozen.at(i, 5) == frozen.at(i, 2));
}

TEST_CASE("variable window sums each neighbor at its own weight") {
  const Sensor n = 24;
  std::vector<int> L(n);
  for (Sensor i = 0; i < n; ++i) {
    const int phase = static_cast<int>(i % 8);
    L[i] = 2 + (phase <= 4 ? phase : 8 - phase);
  }
  const auto t = static_rows(n, 31);
  const int top = 6;
  const auto trace = run(test::ring(n, top), MeasurementField(t, std::nullopt, 2.0),
                         algorithms::VariableWindow{L});
  for (Round k = 0; k <= top; ++k) {
    for (Sensor i = 0; i < n; ++i) {
      const int reach = std::min<int>(k, L[i]);
      double expected = 0.0;
      for (Sensor j = i - reach; j <= i + reach; ++j) {
        expected += cell(t, j, 0, true) / (2.0 * L[test::wrap(j, n)] + 1.0);
      }
      CHECK(std::abs(trace.at(i, k) - expected) < 1e-12);
    }
  }
}

TEST_CASE("variable window weight sums flag non-uniform neighborhoods") {
  const std::vector<int> flat(10, 3);
  for (Sensor i = 0; i < 10; ++i) {
    CHECK(variable_window_weight_sum(flat, i, true) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const std::vector<int> step{2, 2, 2, 2, 3, 3, 3, 3, 3, 2};
  const double direct = 2.0 / 5.0 + 1.0 / 5.0 + 2.0 / 7.0;
  CHECK(variable_window_weight_sum(step, 3, true) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(variable_window_weight_sum(step, 3, true) != doctest::Approx(1.0));
}

TEST_CASE("variable window rejects neighbor jumps above one") {
  CHECK_THROWS_AS(validate_window_profile({2, 4, 4}, false), Error);
  CHECK_THROWS_AS(validate_window_profile({2, 3, 4}, true), Error);
  CHECK_NOTHROW(validate_window_profile({2, 3, 4}, false));
  OwnHistory own;
  NeighborHistory side;
  own.push(0.0);
  side.push(0.0);
  CHECK_THROWS_AS(
      variable_window_transition(0, own, side, side, HalfWidth(2), HalfWidth(4), HalfWidth(2)),
      Error);
}

TEST_CASE("history windows are bounded and report short reads") {
  OwnHistory own;
  CHECK_THROWS_AS(own[0], Error);
  for (int v = 1; v <= 5; ++v) own.push(v);
  CHECK(own.size() == 3);
  CHECK(own[0] == 5.0);
  CHECK(own[2] == 3.0);
  CHECK(NeighborHistory::capacity == 2);
  NeighborHistory n;
  n.push(1.0);
  CHECK(n.or_zero(1) == 0.0);
}
