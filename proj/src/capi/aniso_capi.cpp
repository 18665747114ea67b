#include "aniso.h"

#include "core/besov.hpp"
#include "core/bounds.hpp"
#include "core/harness.hpp"
#include "core/kernel.hpp"
#include "core/smoothing.hpp"
#include "core/solver.hpp"
#include "core/synth.hpp"
#include "core/types.hpp"

#include <cstring>
#include <string>

namespace {

thread_local std::string g_last_error;

template <typename Fn>
aniso_status guarded(Fn&& fn) {
  try {
    fn();
    return ANISO_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return ANISO_ERR_INVALID_ARGUMENT;
  } catch (const aniso::numerical_error& e) {
    g_last_error = e.what();
    return ANISO_ERR_NUMERICAL;
  } catch (const aniso::degenerate_fit_error& e) {
    g_last_error = e.what();
    return ANISO_ERR_DEGENERATE;
  } catch (const aniso::internal_error& e) {
    g_last_error = e.what();
    return ANISO_ERR_INTERNAL;
  } catch (const std::ios_base::failure& e) {
    g_last_error = e.what();
    return ANISO_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ANISO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return ANISO_ERR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

aniso::Vector to_vector(const double* data, int size) {
  require(data != nullptr && size >= 1, "null or empty array argument");
  return Eigen::Map<const aniso::Vector>(data, size);
}

aniso::Bandwidths to_bandwidths(const double* gamma, int d) {
  return aniso::Bandwidths(to_vector(gamma, d));
}

aniso::Matrix to_points(const double* data, long n, int d) {
  require(data != nullptr && n >= 1 && d >= 1, "null or empty point array");
  aniso::Matrix m(n, d);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = data[i * d + j];
  return m;
}

aniso::besov::Callable wrap_fn(aniso_fn f, void* ctx) {
  require(f != nullptr, "null function pointer");
  return [f, ctx](const aniso::Vector& x) {
    return f(x.data(), static_cast<int>(x.size()), ctx);
  };
}

std::vector<int> to_subset_0based(const int* subset_1based, int len, int d) {
  std::vector<int> subset;
  subset.reserve(len);
  for (int i = 0; i < len; ++i) {
    require(subset_1based[i] >= 1 && subset_1based[i] <= d,
            "subset entries must lie in 1..d");
    subset.push_back(subset_1based[i] - 1);
  }
  return subset;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aniso::besov::ModulusQuery make_query(int direction_1based, int order, double lp_p) {
  aniso::besov::ModulusQuery q;
  q.direction = direction_1based - 1;
  q.order = order;
  if (lp_p > 0.0) {
    q.norm = aniso::besov::ModulusNorm::lp;
    q.p = lp_p;
  }
  return q;
}

}  // namespace

struct aniso_model {
  aniso::solver::TrainedModel model;
};

struct aniso_target {
  aniso::synth::Target target;
};

struct aniso_dataset {
  aniso::Dataset data;
};

extern "C" {

const char* aniso_last_error(void) { return g_last_error.c_str(); }

const char* aniso_version(void) { return "0.1.0"; }

/* ---------------- kernel ---------------- */

aniso_status aniso_kernel_eval(const double* x, const double* y, const double* gamma,
                               int d, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::kernel::eval(to_vector(x, d), to_vector(y, d), to_bandwidths(gamma, d));
  });
}

aniso_status aniso_gram_matrix(const double* points, int n, int d, const double* gamma,
                               double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const aniso::Matrix g =
        aniso::kernel::gram(to_points(points, n, d), to_bandwidths(gamma, d));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<long>(i) * n + j] = g(i, j);
  });
}

aniso_status aniso_onb_eval(const int* index, const double* gamma, const double* z,
                            int d, double* out) {
  return guarded([&] {
    require(out != nullptr && index != nullptr, "null argument");
    *out = aniso::kernel::onb_eval(aniso::MultiIndex(std::vector<int>(index, index + d)),
                                   to_bandwidths(gamma, d), to_vector(z, d));
  });
}

aniso_status aniso_kernel_from_onb(const double* x, const double* y, const double* gamma,
                                   int d, int truncation, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::kernel::from_onb(to_vector(x, d), to_vector(y, d),
                                   to_bandwidths(gamma, d), truncation);
  });
}

aniso_status aniso_rkhs_norm_expansion(const double* centers, const double* coefficients,
                                       int n, int d, const double* gamma, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    aniso::KernelExpansion f(to_points(centers, n, d),
                             to_vector(coefficients, n), to_bandwidths(gamma, d));
    *out = aniso::kernel::rkhs_norm(f);
  });
}

aniso_status aniso_rkhs_norm_integral(aniso_fn f, void* ctx, const double* gamma, int d,
                                      int nodes_per_dim, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    aniso::kernel::QuadratureSpec quad;
    if (nodes_per_dim > 0) quad.nodes_per_dim = nodes_per_dim;
    *out = aniso::kernel::rkhs_norm_integral(wrap_fn(f, ctx), to_bandwidths(gamma, d), quad);
  });
}

/* ---------------- solver ---------------- */

aniso_status aniso_fit(const double* inputs, const double* responses, int n, int d,
                       double lambda, const double* gamma, double clip_bound,
                       aniso_model** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const aniso::Dataset data =
        aniso::make_dataset(to_points(inputs, n, d), to_vector(responses, n), clip_bound);
    *out = new aniso_model{aniso::solver::fit(data, lambda, to_bandwidths(gamma, d))};
  });
}

aniso_status aniso_model_predict(const aniso_model* model, const double* x, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = aniso::solver::predict(model->model, to_vector(x, model->model.expansion.dim()));
  });
}

int aniso_model_size(const aniso_model* model) {
  return model ? model->model.expansion.size() : 0;
}

aniso_status aniso_model_coefficients(const aniso_model* model, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const aniso::Vector& a = model->model.expansion.coefficients;
    for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = a[i];
  });
}

aniso_status aniso_model_empirical_risk(const aniso_model* model, const double* inputs,
                                        const double* responses, int n, int clipped,
                                        double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const aniso::Dataset data =
        aniso::make_dataset(to_points(inputs, n, model->model.expansion.dim()),
                            to_vector(responses, n), model->model.clip_bound);
    *out = aniso::solver::empirical_risk(model->model, data, clipped != 0);
  });
}

aniso_status aniso_model_objective(const aniso_model* model, const double* inputs,
                                   const double* responses, int n, double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const aniso::Dataset data =
        aniso::make_dataset(to_points(inputs, n, model->model.expansion.dim()),
                            to_vector(responses, n), model->model.clip_bound);
    *out = aniso::solver::objective(model->model, data);
  });
}

void aniso_model_free(aniso_model* model) { delete model; }

double aniso_clip(double t, double bound) { return aniso::solver::clip(t, bound); }

/* ---------------- besov ---------------- */

aniso_status aniso_effective_smoothness(const double* alpha, int d, double* out) {
  return guarded([&] {
    require(alpha != nullptr && out != nullptr && d >= 1, "null or empty argument");
    *out = aniso::besov::effective_smoothness(std::vector<double>(alpha, alpha + d));
  });
}

aniso_status aniso_effective_smoothness_subset(const double* alpha, int d,
                                               const int* subset_1based, int subset_len,
                                               double* out) {
  return guarded([&] {
    require(alpha != nullptr && out != nullptr && subset_1based != nullptr && d >= 1 &&
                subset_len >= 1,
            "null or empty argument");
    *out = aniso::besov::effective_smoothness_subset(
        std::vector<double>(alpha, alpha + d),
        to_subset_0based(subset_1based, subset_len, d), d);
  });
}

aniso_status aniso_anisotropy_vector(const double* alpha, int d, double* out) {
  return guarded([&] {
    require(alpha != nullptr && out != nullptr && d >= 1, "null or empty argument");
    const std::vector<double> a =
        aniso::besov::anisotropy_vector(std::vector<double>(alpha, alpha + d));
    for (int i = 0; i < d; ++i) out[i] = a[i];
  });
}

aniso_status aniso_forward_difference(aniso_fn f, void* ctx, double x, double h,
                                      int order, double lo, double hi, double* out) {
  return guarded([&] {
    require(f != nullptr && out != nullptr, "null argument");
    const auto f1d = [f, ctx](double t) { return f(&t, 1, ctx); };
    *out = aniso::besov::forward_difference(f1d, x, h, order, lo, hi);
  });
}

aniso_status aniso_modulus_of_smoothness(aniso_fn f, void* ctx, int d, const double* lo,
                                         const double* hi, int direction_1based,
                                         int order, double scale, double lp_p,
                                         double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    aniso::Box box(to_vector(lo, d), to_vector(hi, d));
    aniso::besov::ModulusQuery q = make_query(direction_1based, order, lp_p);
    q.scale = scale;
    *out = aniso::besov::modulus(wrap_fn(f, ctx), q, box);
  });
}

aniso_status aniso_estimate_smoothness_exponent(aniso_fn f, void* ctx, int d,
                                                const double* lo, const double* hi,
                                                int direction_1based, int order,
                                                const double* t_grid, int t_count,
                                                double* out) {
  return guarded([&] {
    require(out != nullptr && t_grid != nullptr && t_count >= 1, "null or empty argument");
    aniso::Box box(to_vector(lo, d), to_vector(hi, d));
    *out = aniso::besov::estimate_smoothness_exponent(
        wrap_fn(f, ctx), direction_1based - 1,
        std::vector<double>(t_grid, t_grid + t_count), order, box);
  });
}

/* ---------------- smoothing ---------------- */

aniso_status aniso_smoother_eval_1d(double x, double gamma, int order, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::smoothing::kernel_1d(x, gamma, order);
  });
}

aniso_status aniso_smoother_eval(const double* x, int d, const double* gamma,
                                 const int* orders, double* out) {
  return guarded([&] {
    require(out != nullptr && orders != nullptr, "null argument");
    aniso::smoothing::SmootherSpec spec(std::vector<int>(orders, orders + d),
                                        to_bandwidths(gamma, d));
    *out = aniso::smoothing::kernel_product(to_vector(x, d), spec);
  });
}

aniso_status aniso_convolve_eval(aniso_fn f, void* ctx, int d, const double* gamma,
                                 const int* orders, const double* lo, const double* hi,
                                 int nodes_per_dim, const double* x, double* out) {
  return guarded([&] {
    require(out != nullptr && orders != nullptr, "null argument");
    aniso::smoothing::SmootherSpec spec(std::vector<int>(orders, orders + d),
                                        to_bandwidths(gamma, d));
    aniso::Box support(to_vector(lo, d), to_vector(hi, d));
    aniso::smoothing::ConvolutionQuad quad;
    if (nodes_per_dim > 0) quad.nodes_per_dim = nodes_per_dim;
    const aniso::smoothing::Smoothed smoothed(wrap_fn(f, ctx), spec, support, quad);
    *out = smoothed(to_vector(x, d));
  });
}

aniso_status aniso_sup_bound_constant(const int* orders, int d, double* out) {
  return guarded([&] {
    require(out != nullptr && orders != nullptr && d >= 1, "null or empty argument");
    *out = aniso::smoothing::sup_bound_constant(std::vector<int>(orders, orders + d));
  });
}

aniso_status aniso_rkhs_bound_convolution(double f_l2_norm, const double* gamma,
                                          const int* orders, int d, double* out) {
  return guarded([&] {
    require(out != nullptr && orders != nullptr, "null argument");
    aniso::smoothing::SmootherSpec spec(std::vector<int>(orders, orders + d),
                                        to_bandwidths(gamma, d));
    *out = aniso::smoothing::rkhs_bound_convolution(f_l2_norm, spec);
  });
}

aniso_status aniso_smoothing_error_constant(int order, double q, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::smoothing::smoothing_error_constant(order, q);
  });
}

/* ---------------- bounds ---------------- */

aniso_status aniso_rate_exponent(double alpha0, int d, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::bounds::rate_exponent(alpha0, d);
  });
}

aniso_status aniso_schedule(long n, const double* alpha, int d, const int* subset_1based,
                            int subset_len, double c1, const double* c2,
                            double* lambda_out, double* gamma_out, int* clamped_out) {
  return guarded([&] {
    require(alpha != nullptr && c2 != nullptr && lambda_out != nullptr &&
                gamma_out != nullptr && d >= 1,
            "null or empty argument");
    aniso::SmoothnessProfile profile{std::vector<double>(alpha, alpha + d), std::nullopt};
    if (subset_1based != nullptr && subset_len > 0)
      profile.active_subset = to_subset_0based(subset_1based, subset_len, d);
    const aniso::bounds::RateSchedule schedule =
        aniso::bounds::make_schedule(profile, c1, std::vector<double>(c2, c2 + d));
    const aniso::bounds::SchedulePoint point = aniso::bounds::schedule_at(schedule, n);
    *lambda_out = point.lambda;
    for (int i = 0; i < d; ++i) gamma_out[i] = point.gamma[i];
    if (clamped_out != nullptr) *clamped_out = point.clamped ? 1 : 0;
  });
}

aniso_status aniso_entropy_bound(int index, double p, const double* gamma, int d,
                                 double capacity_constant, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::bounds::entropy_bound(index, p, to_bandwidths(gamma, d),
                                        capacity_constant, d);
  });
}

aniso_status aniso_entropy_coefficient_rates(double p, double capacity_constant, int d,
                                             const double* gamma, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::bounds::entropy_coefficient_rates(p, capacity_constant, d,
                                                    to_bandwidths(gamma, d));
  });
}

aniso_status aniso_kp_constant(double p, double m_bound, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = aniso::bounds::kp_constant(p, m_bound);
  });
}

aniso_status aniso_oracle_rhs(double approx_term, double b0, double m_bound, double p,
                              double rho, double a, double lambda, long n, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const aniso::bounds::OracleConstants constants{b0, m_bound, p, rho, a};
    *out = aniso::bounds::oracle_rhs(approx_term, constants, lambda, n);
  });
}

aniso_status aniso_approximation_error_bound(double lambda, const double* gamma,
                                             const double* alpha, int d, double c1,
                                             double cs, double* out) {
  return guarded([&] {
    require(out != nullptr && alpha != nullptr, "null argument");
    const aniso::SmoothnessProfile profile{std::vector<double>(alpha, alpha + d),
                                           std::nullopt};
    *out = aniso::bounds::approximation_error_bound(lambda, to_bandwidths(gamma, d),
                                                    profile, c1, cs);
  });
}

aniso_status aniso_optimal_bandwidths(double lambda, long n, double p,
                                      const double* alpha, int d, double* gamma_out) {
  return guarded([&] {
    require(alpha != nullptr && gamma_out != nullptr && d >= 1, "null or empty argument");
    const aniso::SmoothnessProfile profile{std::vector<double>(alpha, alpha + d),
                                           std::nullopt};
    const aniso::Bandwidths gamma = aniso::bounds::optimal_bandwidths(lambda, n, p, profile);
    for (int i = 0; i < d; ++i) gamma_out[i] = gamma[i];
  });
}

/* ---------------- synthetic targets and data ---------------- */

aniso_status aniso_target_create(const char* spec_json, aniso_target** out) {
  return guarded([&] {
    require(spec_json != nullptr && out != nullptr, "null argument");
    *out = new aniso_target{
        aniso::synth::Target(aniso::harness::parse_target_spec(spec_json))};
  });
}

aniso_status aniso_target_eval(const aniso_target* target, const double* x, double* out) {
  return guarded([&] {
    require(target != nullptr && out != nullptr, "null argument");
    *out = target->target(to_vector(x, target->target.dim()));
  });
}

int aniso_target_dim(const aniso_target* target) {
  return target ? target->target.dim() : 0;
}

aniso_status aniso_target_declared_alpha(const aniso_target* target, double* out) {
  return guarded([&] {
    require(target != nullptr && out != nullptr, "null argument");
    const std::vector<double>& a = target->target.declared_alpha();
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  });
}

aniso_status aniso_target_sup_estimate(const aniso_target* target, double* out) {
  return guarded([&] {
    require(target != nullptr && out != nullptr, "null argument");
    *out = target->target.sup_estimate();
  });
}

void aniso_target_free(aniso_target* target) { delete target; }

aniso_status aniso_sample_dataset(const aniso_target* target, long n, double noise_sd,
                                  const char* noise_kind, uint64_t seed,
                                  double clip_bound, aniso_dataset** out) {
  return guarded([&] {
    require(target != nullptr && out != nullptr && noise_kind != nullptr, "null argument");
    aniso::synth::SamplingSpec spec;
    spec.n = n;
    spec.noise_sd = noise_sd;
    spec.seed = seed;
    const std::string kind = noise_kind;
    if (kind == "truncated_gaussian")
      spec.noise = aniso::synth::NoiseKind::truncated_gaussian;
    else if (kind == "uniform")
      spec.noise = aniso::synth::NoiseKind::uniform;
    else
      throw std::invalid_argument("noise_kind must be 'truncated_gaussian' or 'uniform'");
    *out = new aniso_dataset{
        aniso::synth::sample_dataset(target->target, spec, clip_bound)};
  });
}

long aniso_dataset_size(const aniso_dataset* data) {
  return data ? static_cast<long>(data->data.inputs.rows()) : 0;
}

int aniso_dataset_dim(const aniso_dataset* data) {
  return data ? static_cast<int>(data->data.inputs.cols()) : 0;
}

aniso_status aniso_dataset_inputs(const aniso_dataset* data, double* out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    const aniso::Matrix& m = data->data.inputs;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  });
}

aniso_status aniso_dataset_responses(const aniso_dataset* data, double* out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    for (Eigen::Index i = 0; i < data->data.responses.size(); ++i)
      out[i] = data->data.responses[i];
  });
}

void aniso_dataset_free(aniso_dataset* data) { delete data; }

aniso_status aniso_fit_dataset(const aniso_dataset* data, double lambda,
                               const double* gamma, aniso_model** out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    *out = new aniso_model{aniso::solver::fit(
        data->data, lambda,
        to_bandwidths(gamma, static_cast<int>(data->data.inputs.cols())))};
  });
}

aniso_status aniso_excess_risk(const aniso_model* model, const aniso_target* target,
                               long samples, uint64_t seed, double* risk,
                               double* std_error) {
  return guarded([&] {
    require(model != nullptr && target != nullptr && risk != nullptr, "null argument");
    const aniso::synth::ExcessRisk r =
        aniso::synth::excess_risk(model->model, target->target, samples, seed);
    *risk = r.clipped.value;
    if (std_error != nullptr) *std_error = r.clipped.std_error;
  });
}

/* ---------------- experiments ---------------- */

aniso_status aniso_run_experiment(const char* config_json, const char* out_dir,
                                  int workers_override, char** report_json, int* pass) {
  return guarded([&] {
    require(config_json != nullptr && out_dir != nullptr, "null argument");
    aniso::harness::ExperimentConfig cfg =
        aniso::harness::parse_experiment_config(config_json);
    if (workers_override > 0) cfg.workers = workers_override;
    const aniso::harness::Report report = aniso::harness::run_experiment(cfg, out_dir);
    if (report_json != nullptr) *report_json = copy_string(report.json_text);
    if (pass != nullptr) *pass = report.pass ? 1 : 0;
  });
}

aniso_status aniso_fit_loglog_slope(const double* n, const double* risk, int count,
                                    double* slope, double* intercept, double* r_squared,
                                    double* slope_stderr) {
  return guarded([&] {
    require(n != nullptr && risk != nullptr && slope != nullptr && count >= 1,
            "null or empty argument");
    std::vector<std::pair<double, double>> points;
    points.reserve(count);
    for (int i = 0; i < count; ++i) points.emplace_back(n[i], risk[i]);
    const aniso::harness::SlopeFit fit = aniso::harness::fit_loglog_slope(points);
    *slope = fit.slope;
    if (intercept != nullptr) *intercept = fit.intercept;
    if (r_squared != nullptr) *r_squared = fit.r_squared;
    if (slope_stderr != nullptr) *slope_stderr = fit.slope_stderr;
  });
}

void aniso_string_free(char* text) { delete[] text; }

}  // extern "C"
