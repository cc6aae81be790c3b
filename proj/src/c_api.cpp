#include "lac/lac.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "lac/acceptance.hpp"
#include "lac/analysis.hpp"
#include "lac/experiment.hpp"
#include "lac/harness.hpp"
#include "lac/random_spacing.hpp"

struct lac_config {
  lac::ExperimentConfig config;
};

struct lac_trace {
  lac::ConsensusTrace trace;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_key;

lac_status status_for(lac::ErrorKind kind) {
  switch (kind) {
    case lac::ErrorKind::validation:
    case lac::ErrorKind::needs_more_sensors:
      return LAC_ERR_VALIDATION;
    case lac::ErrorKind::out_of_domain:
      return LAC_ERR_DOMAIN;
    case lac::ErrorKind::contract:
    case lac::ErrorKind::terminated:
      return LAC_ERR_CONTRACT;
    case lac::ErrorKind::diverged:
      return LAC_ERR_DIVERGED;
    case lac::ErrorKind::io:
      return LAC_ERR_IO;
    case lac::ErrorKind::internal:
      return LAC_ERR_INTERNAL;
  }
  return LAC_ERR_INTERNAL;
}

lac_status set_error(lac_status status, std::string message, std::string key = {}) {
  last_error = std::move(message);
  last_key = std::move(key);
  return status;
}

template <class F>
lac_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    last_key.clear();
    return LAC_OK;
  } catch (const lac::Error& e) {
    return set_error(status_for(e.kind()), e.what(), e.key());
  } catch (const std::bad_alloc&) {
    return set_error(LAC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(LAC_ERR_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

#define LAC_REQUIRE(cond, what) \
  if (!(cond)) return set_error(LAC_ERR_ARGUMENT, what)

}  // namespace

extern "C" {

const char* lac_version(void) { return "1.0.0"; }

const char* lac_status_string(lac_status status) {
  switch (status) {
    case LAC_OK: return "ok";
    case LAC_ERR_VALIDATION: return "validation error";
    case LAC_ERR_DIVERGED: return "simulation diverged";
    case LAC_ERR_ACCEPTANCE: return "acceptance failure";
    case LAC_ERR_DOMAIN: return "out of domain";
    case LAC_ERR_CONTRACT: return "contract violation";
    case LAC_ERR_IO: return "i/o error";
    case LAC_ERR_INTERNAL: return "internal error";
    case LAC_ERR_ARGUMENT: return "invalid argument";
  }
  return "unknown status";
}

const char* lac_last_error(void) { return last_error.c_str(); }
const char* lac_last_error_key(void) { return last_key.c_str(); }

void lac_string_free(char* text) { std::free(text); }

lac_status lac_config_create(lac_config** out) {
  LAC_REQUIRE(out, "out is null");
  return guarded([&] { *out = new lac_config{}; });
}

lac_status lac_config_parse(const char* ini_text, lac_config** out) {
  LAC_REQUIRE(ini_text && out, "null argument");
  return guarded([&] { *out = new lac_config{lac::ExperimentConfig::parse_ini(ini_text)}; });
}

lac_status lac_config_load(const char* path, lac_config** out) {
  LAC_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new lac_config{lac::ExperimentConfig::load(path)}; });
}

lac_status lac_config_set(lac_config* config, const char* key, const char* value) {
  LAC_REQUIRE(config && key && value, "null argument");
  return guarded([&] { config->config.set(key, value); });
}

lac_status lac_config_get(const lac_config* config, const char* key, char** value) {
  LAC_REQUIRE(config && key && value, "null argument");
  return guarded([&] {
    const auto v = config->config.get(key);
    if (!v) lac::fail(lac::ErrorKind::validation, std::string("unknown config key ") + key, key);
    *value = duplicate(*v);
  });
}

lac_status lac_config_to_ini(const lac_config* config, char** ini_text) {
  LAC_REQUIRE(config && ini_text, "null argument");
  return guarded([&] { *ini_text = duplicate(config->config.to_ini()); });
}

void lac_config_free(lac_config* config) { delete config; }

lac_status lac_simulate(const lac_config* config, lac_trace** out) {
  LAC_REQUIRE(config && out, "null argument");
  return guarded([&] {
    const auto& c = config->config;
    *out = new lac_trace{lac::run(c.chain(), c.field(), c.algorithm())};
  });
}

lac_status lac_trace_dimensions(const lac_trace* trace, long* sensors, int* rounds) {
  LAC_REQUIRE(trace && sensors && rounds, "null argument");
  *sensors = trace->trace.sensors;
  *rounds = trace->trace.rounds;
  return LAC_OK;
}

lac_status lac_trace_value(const lac_trace* trace, long sensor, int round, double* value) {
  LAC_REQUIRE(trace && value, "null argument");
  if (sensor < 0 || sensor >= trace->trace.sensors || round < 0 || round > trace->trace.rounds) {
    return set_error(LAC_ERR_DOMAIN, "sensor or round outside the trace");
  }
  *value = trace->trace.at(sensor, round);
  return LAC_OK;
}

lac_status lac_trace_audit_violations(const lac_trace* trace, size_t* violations) {
  LAC_REQUIRE(trace && violations, "null argument");
  *violations = lac::audit_locality(trace->trace);
  return LAC_OK;
}

lac_status lac_trace_message_count(const lac_trace* trace, size_t* count) {
  LAC_REQUIRE(trace && count, "null argument");
  *count = trace->trace.audit.size();
  return LAC_OK;
}

lac_status lac_trace_write_csv(const lac_trace* trace, const char* path) {
  LAC_REQUIRE(trace && path, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) lac::fail(lac::ErrorKind::io, std::string("cannot write ") + path);
    lac::write_trace_csv(trace->trace, out);
    if (!out) lac::fail(lac::ErrorKind::io, std::string("write failed for ") + path);
  });
}

void lac_trace_free(lac_trace* trace) { delete trace; }

lac_status lac_run_command(const lac_config* config, const char* command) {
  LAC_REQUIRE(config && command, "null argument");
  return guarded([&] { lac::commands::run(command, config->config); });
}

lac_status lac_verify(lac_criterion_callback callback, void* user, int* failed) {
  int failures = 0;
  const lac_status status = guarded([&] {
    lac::acceptance::run_all([&](const lac::acceptance::CriterionResult& r) {
      if (!r.passed) ++failures;
      if (callback) callback(r.id, r.title.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
    });
  });
  if (failed) *failed = failures;
  if (status != LAC_OK) return status;
  if (failures > 0) return set_error(LAC_ERR_ACCEPTANCE, std::to_string(failures) + " criteria failed");
  return LAC_OK;
}

lac_status lac_h_exp(double rho, double omega, double* gain) {
  LAC_REQUIRE(gain, "null argument");
  return guarded([&] { *gain = lac::h_exp(lac::Rate(rho), omega); });
}

lac_status lac_h_window(int L, double omega, double* gain) {
  LAC_REQUIRE(gain, "null argument");
  return guarded([&] { *gain = lac::h_window(lac::HalfWidth(L), omega); });
}

lac_status lac_k_temporal_exp(double rho, double omega, double* gain, double* phase) {
  LAC_REQUIRE(gain && phase, "null argument");
  return guarded([&] {
    const auto s = lac::k_temporal_exp(lac::Rate(rho), omega);
    *gain = s.gain;
    *phase = s.phase;
  });
}

lac_status lac_k_temporal_window(int L, double omega, double* gain, double* phase) {
  LAC_REQUIRE(gain && phase, "null argument");
  return guarded([&] {
    const auto s = lac::k_temporal_window(lac::HalfWidth(L), omega);
    *gain = s.gain;
    *phase = s.phase;
  });
}

lac_status lac_noise_var_exp(double rho, double sigma2, double* variance) {
  LAC_REQUIRE(variance, "null argument");
  return guarded([&] { *variance = lac::noise_var_exp(lac::Rate(rho), sigma2); });
}

lac_status lac_variance_match_rho(int L, double* rho) {
  LAC_REQUIRE(rho, "null argument");
  return guarded([&] { *rho = lac::variance_match_rho(L).rho; });
}

lac_status lac_k_poisson(double rho, double* K) {
  LAC_REQUIRE(K, "null argument");
  return guarded([&] { *K = lac::k_poisson(lac::Rate(rho)); });
}

lac_status lac_k_uniform(double rho, double eta, double* K) {
  LAC_REQUIRE(K, "null argument");
  return guarded([&] { *K = lac::k_uniform(lac::Rate(rho), eta); });
}

}  // extern "C"
