#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lac/field.hpp"
#include "support.hpp"

using namespace lac;

TEST_CASE("constant, impulse and spatial cosine evaluate directly") {
  CHECK(evaluate_field(MeasurementField(fields::Constant{3.5}), 7, 12) == 3.5);
  const MeasurementField impulse(fields::Impulse{0});
  CHECK(evaluate_field(impulse, 0, 0) == 1.0);
  CHECK(evaluate_field(impulse, 1, 0) == 0.0);
  const MeasurementField cosine(fields::SpatialCosine{1.0, std::numbers::pi / 4, 0.0});
  CHECK(evaluate_field(cosine, 4, 9) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("temporal cosine depends on the round only") {
  const MeasurementField f(fields::TemporalCosine{2.0, 0.3, 0.1});
  for (Round k = 0; k < 10; ++k) {
    CHECK(evaluate_field(f, 0, k) == evaluate_field(f, 17, k));
    CHECK(evaluate_field(f, 3, k) == doctest::Approx(2.0 * std::cos(0.3 * k + 0.1)));
  }
}

TEST_CASE("sum adds its terms") {
  const MeasurementField a(fields::Constant{1.5});
  const MeasurementField b(fields::Impulse{2, 4.0});
  const MeasurementField sum(fields::Sum{{a, b}});
  CHECK(evaluate_field(sum, 2, 0) == 5.5);
  CHECK(evaluate_field(sum, 3, 0) == 1.5);
}

TEST_CASE("table lookups and domain errors") {
  fields::Table t;
  t.sensors = 2;
  t.rows = {{1.0, 2.0}, {3.0, 4.0}};
  const MeasurementField f(t);
  CHECK(evaluate_field(f, 1, 1) == 4.0);
  CHECK_THROWS_AS(evaluate_field(f, 2, 0), Error);
  CHECK_THROWS_AS(evaluate_field(f, 0, 2), Error);
  try {
    evaluate_field(f, 5, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_domain);
  }
  t.time_invariant = true;
  t.rows = {{1.0, 2.0}};
  CHECK(evaluate_field(MeasurementField(t), 1, 99) == 2.0);
}

TEST_CASE("bound and finiteness are enforced") {
  CHECK_THROWS_AS(evaluate_field(MeasurementField(fields::Constant{5.0}, std::nullopt, 5.0), 0, 0), Error);
  CHECK_THROWS_AS(MeasurementField(fields::Constant{NAN}).validate(), Error);
  CHECK_THROWS_AS(MeasurementField(fields::SpatialCosine{1.0, INFINITY, 0.0}).validate(), Error);
}

TEST_CASE("noise is a pure function of (i, k, seed)") {
  const MeasurementField f(fields::Constant{0.0}, NoiseSpec{1.0, NoiseDistribution::gaussian, 42});
  const MeasurementField g(fields::Constant{0.0}, NoiseSpec{1.0, NoiseDistribution::gaussian, 43});
  bool differs = false;
  for (Sensor i = 0; i < 20; ++i) {
    for (Round k = 0; k < 5; ++k) {
      CHECK(evaluate_field(f, i, k) == evaluate_field(f, i, k));
      differs = differs || evaluate_field(f, i, k) != evaluate_field(g, i, k);
    }
  }
  CHECK(differs);
}

TEST_CASE("noise moments match the declared sigma") {
  for (auto dist : {NoiseDistribution::gaussian, NoiseDistribution::uniform}) {
    const MeasurementField f(fields::Constant{0.0}, NoiseSpec{2.0, dist, 7});
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double v = evaluate_field(f, i, 0);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.02);
    CHECK(sq / n - mean * mean == doctest::Approx(4.0).epsilon(0.02));
  }
  const MeasurementField u(fields::Constant{0.0}, NoiseSpec{1.0, NoiseDistribution::uniform, 1});
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(evaluate_field(u, i, 0)) <= std::sqrt(3.0));
}

TEST_CASE("time invariance excludes noise") {
  CHECK(MeasurementField(fields::Constant{1.0}, NoiseSpec{1.0, NoiseDistribution::gaussian, 1}).time_invariant());
  CHECK_FALSE(MeasurementField(fields::TemporalCosine{1.0, 0.3, 0.0}).time_invariant());
  CHECK_FALSE(MeasurementField(fields::Sum{{MeasurementField(fields::Constant{}),
                                            MeasurementField(fields::TemporalCosine{1.0, 0.3, 0.0})}})
                  .time_invariant());
}
