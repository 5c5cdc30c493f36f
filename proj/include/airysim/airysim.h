/* C interface to the airysim library. All functions return an airy_status;
 * on failure airy_last_error() returns a thread-local message describing the
 * most recent error on the calling thread. Outputs are written only on
 * success. Handles are opaque and owned by the caller. */
#ifndef AIRYSIM_H
#define AIRYSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AIRY_API __declspec(dllexport)
#else
#define AIRY_API __attribute__((visibility("default")))
#endif

typedef enum airy_status {
  AIRY_OK = 0,
  AIRY_ERR_DOMAIN = 1,
  AIRY_ERR_USAGE = 2,
  AIRY_ERR_NUMERIC = 3,
  AIRY_ERR_REFUSED = 4,
  AIRY_ERR_DIM = 5,
  AIRY_ERR_INTERNAL = 6
} airy_status;

AIRY_API const char* airy_last_error(void);
AIRY_API const char* airy_version(void);

typedef struct airy_estimate {
  double mean;
  double std_error;
  uint64_t n;
  uint64_t seed;
} airy_estimate;

/* Test function x -> fn(x, user) with growth bound |f| <= c1 exp(c2 x^(1-delta)). */
typedef double (*airy_fn)(double x, void* user);
typedef struct airy_test_function {
  airy_fn fn;
  void* user;
  double c1, c2, delta;
} airy_test_function;

/* ---- random tridiagonal models ---- */

typedef enum airy_model_form {
  AIRY_FORM_DUMITRIU_EDELMAN = 0,
  AIRY_FORM_SPIKED_H = 1,
  AIRY_FORM_MODIFIED_M = 2
} airy_model_form;

typedef struct airy_matrix airy_matrix;

AIRY_API airy_status airy_matrix_build(double beta, double w, int64_t N, airy_model_form form, uint64_t seed,
                                       uint64_t stream, airy_matrix** out);
/* Matrix from explicit bands; offdiag has dim - 1 entries. */
AIRY_API airy_status airy_matrix_from_bands(const double* diag, const double* offdiag, size_t dim,
                                            airy_matrix** out);
AIRY_API void airy_matrix_free(airy_matrix* m);
AIRY_API airy_status airy_matrix_dim(const airy_matrix* m, size_t* out);
/* Copy the diagonal (dim values) or off-diagonal (dim - 1 values). */
AIRY_API airy_status airy_matrix_diag(const airy_matrix* m, double* out, size_t len);
AIRY_API airy_status airy_matrix_offdiag(const airy_matrix* m, double* out, size_t len);
AIRY_API airy_status airy_matrix_write_csv(const airy_matrix* m, const char* path);
/* (M / scale)^k v, v and out of length dim (may alias). */
AIRY_API airy_status airy_matrix_power_apply(const airy_matrix* m, const double* v, size_t len, int64_t k,
                                             double scale, double* out);
AIRY_API airy_status airy_matrix_path_sum_entry(const airy_matrix* m, int64_t k, size_t l, size_t l2,
                                                double scale, double* out);
/* Largest q eigenvalues, descending. */
AIRY_API airy_status airy_matrix_top_eigenvalues(const airy_matrix* m, size_t q, double* out);
/* N^(1/6) (2 sqrt N - lambda_i), ascending. */
AIRY_API airy_status airy_matrix_edge_fluctuations(const airy_matrix* m, size_t q, int64_t N, double* out);
/* Noise path sqrt(beta) N^(-1/6) sum (a_m/2 + xi_m) of a ModifiedM build on
 * [0, x_max]. With out == NULL only *len is set. */
AIRY_API airy_status airy_matrix_noise_path(const airy_matrix* m, double x_max, double* dt, double* out,
                                            size_t cap, size_t* len);

AIRY_API airy_status airy_lattice_steps(double T, int64_t N, int64_t* out);
AIRY_API airy_status airy_heuristic_power_check(double lambda, double T, int64_t N, double* power,
                                                double* semigroup);
/* pi_N f, N + 1 entries. */
AIRY_API airy_status airy_project(airy_test_function f, int64_t N, double* out, size_t len);
/* One bilinear-form sample for the ModifiedM matrix of (seed, stream). */
AIRY_API airy_status airy_bilinear_form(airy_test_function f, airy_test_function g, double beta, double w,
                                        int64_t N, double T, uint64_t seed, uint64_t stream, double* out);
/* Mean over n_seeds matrices; matrix i uses stream substream(stream, i). */
AIRY_API airy_status airy_bilinear_mean(airy_test_function f, airy_test_function g, double beta, double w,
                                        int64_t N, double T, uint64_t seed, uint64_t stream, uint64_t n_seeds,
                                        unsigned workers, airy_estimate* out);

/* ---- Feynman-Kac estimators ---- */

typedef struct airy_fk_params {
  double beta;
  double w;
  double T;
  size_t n_steps;
  double delta_a; /* <= 0: sqrt(T / n_steps) */
  uint64_t n_paths;
  int quenched; /* 0 annealed, 1 quenched */
  unsigned workers;
} airy_fk_params;

AIRY_API void airy_fk_params_default(airy_fk_params* p);

typedef struct airy_noise airy_noise;
AIRY_API airy_status airy_noise_generate(double delta_a, uint64_t seed, uint64_t stream, airy_noise** out);
AIRY_API airy_status airy_noise_zero(double delta_a, airy_noise** out);
AIRY_API void airy_noise_free(airy_noise* n);
/* W on the grid j * delta_a, j = 0..n (n + 1 values). */
AIRY_API airy_status airy_noise_values(const airy_noise* n, size_t count, double* out);

AIRY_API airy_status airy_fk_apply(airy_test_function f, double x, const airy_fk_params* p,
                                   const airy_noise* noise, uint64_t seed, uint64_t stream,
                                   airy_estimate* out);
AIRY_API airy_status airy_fk_inner_product(airy_test_function f, airy_test_function g, double rate,
                                           const airy_fk_params* p, const airy_noise* noise, uint64_t seed,
                                           uint64_t stream, airy_estimate* out);
AIRY_API airy_status airy_kernel_estimate(double x, double y, const airy_fk_params* p, const airy_noise* noise,
                                          uint64_t seed, uint64_t stream, airy_estimate* kernel,
                                          airy_estimate* crossing, double* crossing_expected);
AIRY_API airy_status airy_expected_kernel_00(const airy_fk_params* p, uint64_t seed, uint64_t stream,
                                             airy_estimate* out);
AIRY_API airy_status airy_trace_estimate(const airy_fk_params* p, double x_max, size_t n_x, uint64_t seed,
                                         uint64_t stream, airy_estimate* out, double* tail);
AIRY_API airy_status airy_semigroup_residual(double x, double y, double T1, double T2, const airy_fk_params* p,
                                             const airy_noise* noise, uint64_t seed, uint64_t stream,
                                             airy_estimate* residual, airy_estimate* composed,
                                             airy_estimate* direct);

/* ---- closed forms ---- */

AIRY_API airy_status airy_expected_kernel_00_beta2(double w, double T, double* out);
AIRY_API airy_status airy_conditional_law(double alpha, double* mean, double* variance);
AIRY_API airy_status airy_mgf_A(double kappa, double* out);
AIRY_API airy_status airy_moment_A(int n, double* out);
AIRY_API airy_status airy_odd_moment_A(int n, double* out);
AIRY_API airy_status airy_moment_L0(int m, double* out);

typedef struct airy_table_entry {
  int n;
  double gaussian_part;
  double excess;
  double sqrt6pi_coeff;
  double value;
} airy_table_entry;
AIRY_API airy_status airy_moment_table_entry(int n, airy_table_entry* out);
AIRY_API int airy_moment_table_size(void);

/* Mixture sampler A = Z - (sqrt 3 / 2) L0: sample moments of orders 1..max_order. */
AIRY_API airy_status airy_mixture_moments(uint64_t n_draws, int max_order, uint64_t seed, unsigned workers,
                                          double* means, double* std_errors);

/* ---- lattice paths (text form "start;s1,s2,...") ---- */

/* Writes the result into out (capacity cap, NUL-terminated). */
AIRY_API airy_status airy_skorokhod_map_text(const char* path, char* out, size_t cap);
AIRY_API airy_status airy_skorokhod_inverse_text(const char* path, char* out, size_t cap);
AIRY_API airy_status airy_strip_zero_horizontals_text(const char* path, char* out, size_t cap);
AIRY_API airy_status airy_horizontal_count_text(const char* path, int64_t* out);

typedef struct airy_skorokhod_report {
  size_t k;
  int64_t start;
  uint64_t paths;
  uint64_t round_trips;
  uint64_t lazy_outputs;
  uint64_t distinct_images;
  uint64_t horizontal_ok;
  int ok;
} airy_skorokhod_report;
AIRY_API airy_status airy_validate_skorokhod(size_t k, int64_t start, airy_skorokhod_report* out);

/* ---- validation experiments ---- */

typedef struct airy_moment_check {
  uint64_t n;
  double mean, mean_se, variance, variance_se, skewness, skewness_se;
  double target_mean, target_variance;
  double mean_z, variance_z, skewness_z;
} airy_moment_check;

typedef enum airy_law_route {
  AIRY_ROUTE_BESSEL_MODULUS = 0,
  AIRY_ROUTE_BESSEL_SDE = 1,
  AIRY_ROUTE_PATH_BINNING = 2
} airy_law_route;

/* n is the sample count for the Bessel routes and the path count for the
 * binning route; half_width and bandwidth only apply to the binning route. */
AIRY_API airy_status airy_conditional_law_check(airy_law_route route, double alpha, double half_width,
                                                uint64_t n, size_t n_steps, double bandwidth, uint64_t seed,
                                                unsigned workers, airy_moment_check* out);

typedef struct airy_ks_check {
  double statistic;
  double threshold;
  uint64_t n;
  int passed;
} airy_ks_check;

AIRY_API airy_status airy_ks_lazy_endpoint(size_t k, uint64_t n_samples, uint64_t seed, unsigned workers,
                                           double threshold, airy_ks_check* out);
AIRY_API airy_status airy_ks_horizontal_local_time(size_t k, uint64_t n_samples, size_t n_steps_continuum,
                                                   uint64_t seed, unsigned workers, double threshold,
                                                   airy_ks_check* out);

#ifdef __cplusplus
}
#endif

#endif /* AIRYSIM_H */
