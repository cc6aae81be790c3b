#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "lac/lac.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  lac_config* ptr = nullptr;
  Config() { REQUIRE(lac_config_create(&ptr) == LAC_OK); }
  ~Config() { lac_config_free(ptr); }
  void set(const char* key, const char* value) { REQUIRE(lac_config_set(ptr, key, value) == LAC_OK); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(lac_version()).size() > 0);
  CHECK(std::string(lac_status_string(LAC_OK)) != std::string(lac_status_string(LAC_ERR_DIVERGED)));
}

TEST_CASE("config round-trip through the C boundary") {
  Config c;
  c.set("chain.n", "9");
  char* value = nullptr;
  REQUIRE(lac_config_get(c.ptr, "chain.n", &value) == LAC_OK);
  CHECK(std::string(value) == "9");
  lac_string_free(value);
  char* ini = nullptr;
  REQUIRE(lac_config_to_ini(c.ptr, &ini) == LAC_OK);
  lac_config* parsed = nullptr;
  REQUIRE(lac_config_parse(ini, &parsed) == LAC_OK);
  lac_string_free(ini);
  REQUIRE(lac_config_get(parsed, "chain.n", &value) == LAC_OK);
  CHECK(std::string(value) == "9");
  lac_string_free(value);
  lac_config_free(parsed);

  CHECK(lac_config_set(c.ptr, "chain.shape", "x") == LAC_ERR_VALIDATION);
  CHECK(std::string(lac_last_error_key()) == "chain.shape");
  CHECK(std::string(lac_last_error()).size() > 0);
  CHECK(lac_config_parse("[chain]\nbogus=1\n", &parsed) == LAC_ERR_VALIDATION);
  CHECK(lac_config_get(nullptr, "chain.n", &value) == LAC_ERR_ARGUMENT);
  CHECK(lac_config_load("/nonexistent/lac.ini", &parsed) != LAC_OK);
}

TEST_CASE("simulation through handles") {
  Config c;
  c.set("chain.n", "7");
  c.set("chain.rounds", "3");
  c.set("algorithm.variant", "window");
  c.set("algorithm.L", "3");
  c.set("field.kind", "impulse");
  c.set("field.center", "2");
  lac_trace* trace = nullptr;
  REQUIRE(lac_simulate(c.ptr, &trace) == LAC_OK);
  long sensors = 0;
  int rounds = 0;
  REQUIRE(lac_trace_dimensions(trace, &sensors, &rounds) == LAC_OK);
  CHECK(sensors == 7);
  CHECK(rounds == 3);
  for (long i = 0; i < 7; ++i) {
    double y = 0.0;
    REQUIRE(lac_trace_value(trace, i, 3, &y) == LAC_OK);
    CHECK(y == doctest::Approx(1.0 / 7.0));
  }
  double y = 0.0;
  CHECK(lac_trace_value(trace, 7, 0, &y) == LAC_ERR_DOMAIN);
  size_t violations = 1;
  REQUIRE(lac_trace_audit_violations(trace, &violations) == LAC_OK);
  CHECK(violations == 0);
  size_t messages = 0;
  REQUIRE(lac_trace_message_count(trace, &messages) == LAC_OK);
  CHECK(messages == 3u * 7u * 2u);
  const fs::path csv = fs::temp_directory_path() / "lac_c_api_trace.csv";
  CHECK(lac_trace_write_csv(trace, csv.c_str()) == LAC_OK);
  CHECK(fs::file_size(csv) > 0);
  fs::remove(csv);
  CHECK(lac_trace_write_csv(trace, "/nonexistent/dir/t.csv") == LAC_ERR_IO);
  lac_trace_free(trace);
}

TEST_CASE("error kinds map to status codes") {
  Config c;
  c.set("chain.n", "4");
  c.set("algorithm.variant", "window");
  c.set("algorithm.L", "3");
  lac_trace* trace = nullptr;
  CHECK(lac_simulate(c.ptr, &trace) == LAC_ERR_VALIDATION);
  CHECK(std::string(lac_last_error_key()) == "chain.n");

  Config d;
  d.set("chain.n", "16");
  d.set("chain.rounds", "2");
  d.set("algorithm.variant", "arbitrary");
  d.set("algorithm.radius", "2");
  d.set("algorithm.K", "1e-300");
  d.set("algorithm.enforce_row_sums", "false");
  d.set("field.value", "1e11");
  CHECK(lac_simulate(d.ptr, &trace) == LAC_ERR_DIVERGED);

  double g = 0.0;
  CHECK(lac_h_exp(1.5, 0.0, &g) == LAC_ERR_VALIDATION);
  CHECK(lac_h_exp(0.5, 0.0, nullptr) == LAC_ERR_ARGUMENT);
}

TEST_CASE("closed forms") {
  double v = 0.0;
  double p = 0.0;
  REQUIRE(lac_h_exp(0.5, std::acos(-1.0), &v) == LAC_OK);
  CHECK(v == doctest::Approx(1.0 / 9.0));
  REQUIRE(lac_h_window(1, 0.0, &v) == LAC_OK);
  CHECK(v == 1.0);
  REQUIRE(lac_k_temporal_exp(0.8, 0.0, &v, &p) == LAC_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(p == doctest::Approx(0.0));
  REQUIRE(lac_k_temporal_window(1, std::acos(-1.0) / 2, &v, &p) == LAC_OK);
  CHECK(v == doctest::Approx(std::sqrt(5.0) / 3.0));
  REQUIRE(lac_noise_var_exp(0.5, 1.0, &v) == LAC_OK);
  CHECK(v == doctest::Approx(5.0 / 27.0));
  REQUIRE(lac_variance_match_rho(5, &v) == LAC_OK);
  CHECK(v == doctest::Approx(7.0 / 11.0));
  REQUIRE(lac_k_poisson(std::exp(-1.0), &v) == LAC_OK);
  CHECK(v == doctest::Approx(1.0 / 3.0));
  REQUIRE(lac_k_uniform(0.9, 0.3, &v) == LAC_OK);
  CHECK(v > 0.0);
  CHECK(lac_k_uniform(0.9, 1.2, &v) == LAC_ERR_VALIDATION);
}

TEST_CASE("commands write into the configured directory") {
  const fs::path dir = fs::temp_directory_path() / "lac_c_api_figures";
  fs::remove_all(dir);
  Config c;
  c.set("output.dir", dir.c_str());
  REQUIRE(lac_run_command(c.ptr, "figures") == LAC_OK);
  CHECK(fs::exists(dir / "fig_k_window.csv"));
  CHECK(lac_run_command(c.ptr, "draw") == LAC_ERR_VALIDATION);
  fs::remove_all(dir);
}
