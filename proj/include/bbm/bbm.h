/* C interface to the stochastic BBM simulator. All handles are opaque; every
 * call returns a status code and the message of the last failure on the
 * calling thread is available from bbm_last_error(). */
#ifndef BBM_BBM_H
#define BBM_BBM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BBM_BUILDING_LIBRARY)
#define BBM_API __declspec(dllexport)
#else
#define BBM_API __declspec(dllimport)
#endif
#else
#define BBM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..5 coincide with the CLI exit codes. */
typedef enum bbm_status {
  BBM_OK = 0,
  BBM_ERR_INTERNAL = 1,
  BBM_ERR_CONFIG = 2,
  BBM_ERR_DIVERGENCE = 3,
  BBM_ERR_WINDOW = 4,
  BBM_ERR_ACCEPTANCE = 5,
  BBM_ERR_INVALID_ARGUMENT = 6,
  BBM_ERR_CONTRACT = 7,
  BBM_ERR_IO = 8
} bbm_status;

typedef struct bbm_config bbm_config;
typedef struct bbm_basis bbm_basis;
typedef struct bbm_path bbm_path;

typedef struct bbm_run_options {
  const char* out_dir; /* NULL: current directory */
  int has_seed;
  uint64_t seed;
  int threads; /* <= 0: 1 */
  int quiet;   /* nonzero: no progress output on stdout */
} bbm_run_options;

typedef struct bbm_constants {
  double nu, gamma1, gamma2, lambda, beta0, h_h1norm, delta, beta, alpha;
  int alpha_ok;
} bbm_constants;

BBM_API const char* bbm_version(void);
/* Thread-local; valid until the next failing call on this thread. */
BBM_API const char* bbm_last_error(void);

BBM_API bbm_status bbm_config_load(const char* path, bbm_config** out);
BBM_API bbm_status bbm_config_parse(const char* text, bbm_config** out);
BBM_API bbm_status bbm_config_preset(const char* name, bbm_config** out);
BBM_API bbm_status bbm_config_set(bbm_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated); *needed gets the full length. */
BBM_API bbm_status bbm_config_get(const bbm_config* cfg, const char* key, char* buf, size_t size, size_t* needed);
BBM_API bbm_status bbm_config_dump(const bbm_config* cfg, char* buf, size_t size, size_t* needed);
BBM_API bbm_status bbm_config_validate(const bbm_config* cfg);
BBM_API void bbm_config_free(bbm_config* cfg);

/* Runs a subcommand (constants, simulate, pullback, absorb, tails, spectral,
 * attractor, verify). BBM_ERR_ACCEPTANCE when verify finds a failure. */
BBM_API bbm_status bbm_run_command(const bbm_config* cfg, const char* subcommand, const bbm_run_options* opts);

BBM_API bbm_status bbm_basis_create(double a, double b, double L, int m1, int m2, int m3, bbm_basis** out);
BBM_API size_t bbm_basis_mode_count(const bbm_basis* basis);
BBM_API double bbm_basis_poincare(const bbm_basis* basis);
/* Eigenvalue of mode (m, n, p), 1-based. */
BBM_API bbm_status bbm_basis_eigenvalue(const bbm_basis* basis, int m, int n, int p, double* out);
BBM_API void bbm_basis_free(bbm_basis* basis);

BBM_API bbm_status bbm_path_sample(uint64_t seed, double t0, double t1, double dt, bbm_path** out);
BBM_API bbm_status bbm_path_load(const char* file, bbm_path** out);
BBM_API bbm_status bbm_path_save(const bbm_path* path, const char* file);
/* omega(t) at a grid-aligned time. */
BBM_API bbm_status bbm_path_value(const bbm_path* path, double t, double* out);
BBM_API void bbm_path_free(bbm_path* path);

BBM_API bbm_status bbm_constants_compute(const bbm_config* cfg, bbm_constants* out);
BBM_API uint64_t bbm_split_seed(uint64_t master, uint64_t index);

#ifdef __cplusplus
}
#endif

#endif
