/* aniso — least-squares SVM regression with anisotropic Gaussian RBF kernels,
 * plus the smoothness toolkit, bound calculators and experiment harness that
 * go with it. C API over the C++ core; every handle is opaque and every
 * fallible call returns a status code. */

#ifndef ANISO_H
#define ANISO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aniso_status {
  ANISO_OK = 0,
  ANISO_ERR_INVALID_ARGUMENT = 1,
  ANISO_ERR_NUMERICAL = 2,
  ANISO_ERR_DEGENERATE = 3,
  ANISO_ERR_IO = 4,
  ANISO_ERR_INTERNAL = 5
} aniso_status;

/* Message for the most recent failure on the calling thread. */
const char* aniso_last_error(void);

const char* aniso_version(void);

/* Scalar function callback: x has d entries, ctx is caller state. */
typedef double (*aniso_fn)(const double* x, int d, void* ctx);

/* ---------------- kernel ---------------- */

/* exp(-sum_j (x_j-y_j)^2/gamma_j^2) */
aniso_status aniso_kernel_eval(const double* x, const double* y, const double* gamma,
                               int d, double* out);

/* Symmetric n x n kernel matrix of n points (row-major, d columns). */
aniso_status aniso_gram_matrix(const double* points, int n, int d, const double* gamma,
                               double* out);

/* Tensor orthonormal basis function with multi-index `index`. */
aniso_status aniso_onb_eval(const int* index, const double* gamma, const double* z,
                            int d, double* out);

/* Partial basis reconstruction of the kernel (all index components < truncation). */
aniso_status aniso_kernel_from_onb(const double* x, const double* y, const double* gamma,
                                   int d, int truncation, double* out);

/* sqrt(a^T K a) of a finite expansion. */
aniso_status aniso_rkhs_norm_expansion(const double* centers, const double* coefficients,
                                       int n, int d, const double* gamma, double* out);

/* Weighted-L2 integral form of the RKHS norm by tensor Gauss-Hermite quadrature
 * (diagnostic; d <= 4). */
aniso_status aniso_rkhs_norm_integral(aniso_fn f, void* ctx, const double* gamma, int d,
                                      int nodes_per_dim, double* out);

/* ---------------- solver ---------------- */

typedef struct aniso_model aniso_model;

/* Regularized least-squares fit: dual system (K + lambda n I) alpha = y. */
aniso_status aniso_fit(const double* inputs, const double* responses, int n, int d,
                       double lambda, const double* gamma, double clip_bound,
                       aniso_model** out);

aniso_status aniso_model_predict(const aniso_model* model, const double* x, double* out);
int aniso_model_size(const aniso_model* model);
aniso_status aniso_model_coefficients(const aniso_model* model, double* out);

/* Mean squared error on the given sample; clipped != 0 clips predictions first. */
aniso_status aniso_model_empirical_risk(const aniso_model* model, const double* inputs,
                                        const double* responses, int n, int clipped,
                                        double* out);

/* Raw empirical risk + lambda ||f||_H^2. */
aniso_status aniso_model_objective(const aniso_model* model, const double* inputs,
                                   const double* responses, int n, double* out);

void aniso_model_free(aniso_model* model);

/* Truncation of t into [-bound, bound] (bound must be positive). */
double aniso_clip(double t, double bound);

/* ---------------- besov ---------------- */

aniso_status aniso_effective_smoothness(const double* alpha, int d, double* out);
aniso_status aniso_effective_smoothness_subset(const double* alpha, int d,
                                               const int* subset_1based, int subset_len,
                                               double* out);
aniso_status aniso_anisotropy_vector(const double* alpha, int d, double* out);

/* r-th forward difference of a univariate function (x outside [lo, hi] -> 0). */
aniso_status aniso_forward_difference(aniso_fn f, void* ctx, double x, double h,
                                      int order, double lo, double hi, double* out);

/* Directional modulus of smoothness on the box [lo, hi]^d. lp_p = 0 selects the
 * sup norm; lp_p > 0 selects the L_p norm with that exponent. */
aniso_status aniso_modulus_of_smoothness(aniso_fn f, void* ctx, int d, const double* lo,
                                         const double* hi, int direction_1based,
                                         int order, double scale, double lp_p,
                                         double* out);

/* Log-log slope of the modulus over t_grid; estimates min(alpha_i, order). */
aniso_status aniso_estimate_smoothness_exponent(aniso_fn f, void* ctx, int d,
                                                const double* lo, const double* hi,
                                                int direction_1based, int order,
                                                const double* t_grid, int t_count,
                                                double* out);

/* ---------------- smoothing ---------------- */

aniso_status aniso_smoother_eval_1d(double x, double gamma, int order, double* out);
aniso_status aniso_smoother_eval(const double* x, int d, const double* gamma,
                                 const int* orders, double* out);

/* (K * f)(x) with f supported on [lo, hi]^d (zero outside), by signed-mixture
 * Gauss-Hermite quadrature (d <= 3). */
aniso_status aniso_convolve_eval(aniso_fn f, void* ctx, int d, const double* gamma,
                                 const int* orders, const double* lo, const double* hi,
                                 int nodes_per_dim, const double* x, double* out);

aniso_status aniso_sup_bound_constant(const int* orders, int d, double* out);
aniso_status aniso_rkhs_bound_convolution(double f_l2_norm, const double* gamma,
                                          const int* orders, int d, double* out);
aniso_status aniso_smoothing_error_constant(int order, double q, double* out);

/* ---------------- bounds ---------------- */

aniso_status aniso_rate_exponent(double alpha0, int d, double* out);

/* lambda_n = c1/n; gamma_{i,n} = c2_i n^(-alpha0/(alpha_i(2 alpha0+d))), clamped
 * into (0,1]. A non-null subset (1-based dims, subset_len entries) switches to
 * the subset effective smoothness and holds out-of-subset dims at 1. */
aniso_status aniso_schedule(long n, const double* alpha, int d, const int* subset_1based,
                            int subset_len, double c1, const double* c2,
                            double* lambda_out, double* gamma_out, int* clamped_out);

aniso_status aniso_entropy_bound(int index, double p, const double* gamma, int d,
                                 double capacity_constant, double* out);
aniso_status aniso_entropy_coefficient_rates(double p, double capacity_constant, int d,
                                             const double* gamma, double* out);
aniso_status aniso_kp_constant(double p, double m_bound, double* out);
aniso_status aniso_oracle_rhs(double approx_term, double b0, double m_bound, double p,
                              double rho, double a, double lambda, long n, double* out);
aniso_status aniso_approximation_error_bound(double lambda, const double* gamma,
                                             const double* alpha, int d, double c1,
                                             double cs, double* out);
aniso_status aniso_optimal_bandwidths(double lambda, long n, double p,
                                      const double* alpha, int d, double* gamma_out);

/* ---------------- synthetic targets and data ---------------- */

typedef struct aniso_target aniso_target;

/* spec_json uses the harness config "target" schema. */
aniso_status aniso_target_create(const char* spec_json, aniso_target** out);
aniso_status aniso_target_eval(const aniso_target* target, const double* x, double* out);
int aniso_target_dim(const aniso_target* target);
aniso_status aniso_target_declared_alpha(const aniso_target* target, double* out);
aniso_status aniso_target_sup_estimate(const aniso_target* target, double* out);
void aniso_target_free(aniso_target* target);

typedef struct aniso_dataset aniso_dataset;

/* noise_kind is "truncated_gaussian" or "uniform"; responses stay in [-M, M]. */
aniso_status aniso_sample_dataset(const aniso_target* target, long n, double noise_sd,
                                  const char* noise_kind, uint64_t seed,
                                  double clip_bound, aniso_dataset** out);
long aniso_dataset_size(const aniso_dataset* data);
int aniso_dataset_dim(const aniso_dataset* data);
aniso_status aniso_dataset_inputs(const aniso_dataset* data, double* out);
aniso_status aniso_dataset_responses(const aniso_dataset* data, double* out);
void aniso_dataset_free(aniso_dataset* data);

aniso_status aniso_fit_dataset(const aniso_dataset* data, double lambda,
                               const double* gamma, aniso_model** out);

/* Monte-Carlo excess risk of the clipped predictor against the target. */
aniso_status aniso_excess_risk(const aniso_model* model, const aniso_target* target,
                               long samples, uint64_t seed, double* risk,
                               double* std_error);

/* ---------------- experiments ---------------- */

/* Runs the experiment described by config_json; writes results.csv, slope.csv
 * and report.json under out_dir. workers_override > 0 replaces the configured
 * worker count. *report_json (optional) receives the report text — release it
 * with aniso_string_free. *pass (optional) is 1 when every configured
 * threshold held. */
aniso_status aniso_run_experiment(const char* config_json, const char* out_dir,
                                  int workers_override, char** report_json, int* pass);

aniso_status aniso_fit_loglog_slope(const double* n, const double* risk, int count,
                                    double* slope, double* intercept, double* r_squared,
                                    double* slope_stderr);

void aniso_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* ANISO_H */
