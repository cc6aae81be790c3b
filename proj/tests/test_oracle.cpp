#include <doctest.h>

#include <cmath>
#include <vector>

#include "lac/harness.hpp"
#include "lac/oracle.hpp"
#include "support.hpp"

using namespace lac;

TEST_CASE("domains follow the boundary policy") {
  CHECK(oracle::Domain::from(test::ring(9, 1)).periodic);
  CHECK_FALSE(oracle::Domain::from(test::halo(9, 1)).periodic);
  CHECK_THROWS_AS(oracle::Domain::from(test::truncated(9, 1)), Error);
}

TEST_CASE("exponential target with a round limit is the plain weighted sum") {
  const auto field = static_table({1.0, 2.0, 3.0, 4.0, 5.0}, 10.0);
  const oracle::Domain ring{5, true};
  const auto v = oracle::exp_target(field, 0, Rate(0.5), oracle::RoundLimit{1}, ring);
  CHECK(v.value == doctest::Approx((1.0 / 3.0) * (1.0 + 0.5 * (5.0 + 2.0))));
  CHECK(v.tail_bound == doctest::Approx((1.0 / 3.0) * 2 * 10.0 * 0.25 / 0.5));
  const oracle::Domain line{5, false};
  const auto h = oracle::exp_target(field, 0, Rate(0.5), oracle::RoundLimit{2}, line);
  CHECK(h.value == doctest::Approx((1.0 / 3.0) * (1.0 + 0.5 * 2.0 + 0.25 * 3.0)));
}

TEST_CASE("tail tolerance lands within epsilon of the infinite sum") {
  const Sensor n = 16;
  const auto field = test::random_field(n, 0, 5);
  const double rho = 0.9;
  for (Sensor i = 0; i < n; ++i) {
    double limit = test::cell(std::get<fields::Table>(field.kind()), i, 0, true);
    for (int j = 1; j < 3000; ++j) {
      limit += std::pow(rho, j) * (test::cell(std::get<fields::Table>(field.kind()), i - j, 0, true) +
                                   test::cell(std::get<fields::Table>(field.kind()), i + j, 0, true));
    }
    limit *= (1 - rho) / (1 + rho);
    const auto v = oracle::exp_target(field, i, Rate(rho), oracle::TailTolerance{1e-10}, {n, true});
    CHECK(v.tail_bound <= 1e-10);
    CHECK(std::abs(v.value - limit) <= 1e-10);
  }
}

TEST_CASE("window targets") {
  const auto field = static_table({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}, 10.0);
  CHECK(oracle::window_target(field, 3, HalfWidth(1), {7, true}) == doctest::Approx(4.0));
  CHECK(oracle::window_target(field, 0, HalfWidth(1), {7, true}) == doctest::Approx(10.0 / 3.0));
  CHECK(oracle::window_target(field, 0, HalfWidth(1), {7, false}) == doctest::Approx(1.0));
  CHECK(oracle::window_partial_target(field, 3, HalfWidth(2), 1, {7, true}) == doctest::Approx(12.0 / 5.0));
  CHECK_THROWS_AS(oracle::window_target(field, 0, HalfWidth(4), {7, true}), Error);
  CHECK(oracle::variable_window_target(field, 3, {1, 1, 1, 1, 1, 1, 1}, 5, {7, true}) ==
        doctest::Approx(4.0));
  CHECK_THROWS_AS(oracle::variable_window_target(field, 3, {1, 1}, 5, {7, true}), Error);
}

TEST_CASE("queries outside the real chain are rejected") {
  const auto field = static_table({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(oracle::dyn_exp_target(field, 3, 0, Rate(0.5), {3, true}), Error);
  CHECK_THROWS_AS(oracle::dyn_window_target(field, 0, -1, HalfWidth(1), {3, true}), Error);
}

TEST_CASE("dynamic targets read the measurement delayed by distance") {
  fields::Table t;
  t.sensors = 5;
  t.rows = {{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
  t.rows[1][3] = 9.0;  // x_3(1)
  const MeasurementField field(t);
  CHECK(oracle::dyn_window_target(field, 2, 2, HalfWidth(2), {5, false}) == doctest::Approx(9.0 / 5.0));
  CHECK(oracle::dyn_window_target(field, 1, 2, HalfWidth(2), {5, false}) == 0.0);
  CHECK(oracle::dyn_exp_target(field, 2, 2, Rate(0.5), {5, false}) == doctest::Approx(9.0 * 0.5 / 3.0));
}

TEST_CASE("property: harness agrees with the oracle for every algorithm") {
  const Sensor n = 32;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::vector<int> L(n);
    for (Sensor i = 0; i < n; ++i) L[i] = 2 + static_cast<int>(std::min<Sensor>(i % 8, 8 - i % 8));
    const std::vector<std::pair<AlgorithmSpec, Round>> cases{
        {algorithms::Exponential{Rate(0.8)}, 25},
        {algorithms::Asymmetric{Rate(0.5), Rate(0.25)}, 25},
        {algorithms::Window{HalfWidth(5)}, 5},
        {algorithms::VariableWindow{L}, 6},
        {algorithms::Arbitrary{WeightTable::geometric(n, Rate(0.8), 12), false, 0.0}, 14},
        {algorithms::DynExponential{Rate(0.8)}, 25},
        {algorithms::DynWindow{HalfWidth(3)}, 25}};
    for (const auto& [algo, rounds] : cases) {
      for (const auto& chain : {test::ring(n, rounds), test::halo(n, rounds)}) {
        const auto field = test::random_field(n, rounds, seed * 17);
        const auto trace = run(chain, field, algo);
        const auto domain = oracle::Domain::from(chain);
        double worst = 0.0;
        for (Round k = 0; k <= rounds; ++k) {
          for (Sensor i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(trace.at(i, k) - oracle::target(algo, field, i, k, domain)));
          }
        }
        CHECK(worst < 1e-10);
      }
    }
  }
}
