/* Local average consensus on 1D sensor chains: C interface.
 *
 * All functions return a lac_status. On failure, lac_last_error() returns a
 * thread-local message and lac_last_error_key() the offending config key
 * (empty when not applicable). Handles are opaque and owned by the caller. */
#ifndef LAC_H
#define LAC_H

#include <stddef.h>

#if defined(_WIN32)
#define LAC_API __declspec(dllexport)
#else
#define LAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lac_status {
  LAC_OK = 0,
  LAC_ERR_VALIDATION = 1,
  LAC_ERR_DIVERGED = 2,
  LAC_ERR_ACCEPTANCE = 3,
  LAC_ERR_DOMAIN = 4,
  LAC_ERR_CONTRACT = 5,
  LAC_ERR_IO = 6,
  LAC_ERR_INTERNAL = 7,
  LAC_ERR_ARGUMENT = 8
} lac_status;

typedef struct lac_config lac_config;
typedef struct lac_trace lac_trace;

LAC_API const char* lac_version(void);
LAC_API const char* lac_status_string(lac_status status);
LAC_API const char* lac_last_error(void);
LAC_API const char* lac_last_error_key(void);

/* Strings returned through char** are released with lac_string_free. */
LAC_API void lac_string_free(char* text);

/* Configuration */
LAC_API lac_status lac_config_create(lac_config** out);
LAC_API lac_status lac_config_parse(const char* ini_text, lac_config** out);
LAC_API lac_status lac_config_load(const char* path, lac_config** out);
LAC_API lac_status lac_config_set(lac_config* config, const char* key, const char* value);
LAC_API lac_status lac_config_get(const lac_config* config, const char* key, char** value);
LAC_API lac_status lac_config_to_ini(const lac_config* config, char** ini_text);
LAC_API void lac_config_free(lac_config* config);

/* Simulation */
LAC_API lac_status lac_simulate(const lac_config* config, lac_trace** out);
LAC_API lac_status lac_trace_dimensions(const lac_trace* trace, long* sensors, int* rounds);
LAC_API lac_status lac_trace_value(const lac_trace* trace, long sensor, int round, double* value);
LAC_API lac_status lac_trace_audit_violations(const lac_trace* trace, size_t* violations);
LAC_API lac_status lac_trace_message_count(const lac_trace* trace, size_t* count);
LAC_API lac_status lac_trace_write_csv(const lac_trace* trace, const char* path);
LAC_API void lac_trace_free(lac_trace* trace);

/* Commands: "simulate", "freq-spatial", "freq-temporal", "noise", "spacing",
 * "figures". Files go to the config's output.dir. */
LAC_API lac_status lac_run_command(const lac_config* config, const char* command);

typedef void (*lac_criterion_callback)(int id, const char* title, int passed,
                                       const char* detail, double seconds, void* user);

/* Runs the acceptance criteria. Returns LAC_ERR_ACCEPTANCE if any fails. */
LAC_API lac_status lac_verify(lac_criterion_callback callback, void* user, int* failed);

/* Closed forms */
LAC_API lac_status lac_h_exp(double rho, double omega, double* gain);
LAC_API lac_status lac_h_window(int L, double omega, double* gain);
LAC_API lac_status lac_k_temporal_exp(double rho, double omega, double* gain, double* phase);
LAC_API lac_status lac_k_temporal_window(int L, double omega, double* gain, double* phase);
LAC_API lac_status lac_noise_var_exp(double rho, double sigma2, double* variance);
LAC_API lac_status lac_variance_match_rho(int L, double* rho);
LAC_API lac_status lac_k_poisson(double rho, double* K);
LAC_API lac_status lac_k_uniform(double rho, double eta, double* K);

#ifdef __cplusplus
}
#endif

#endif /* LAC_H */
