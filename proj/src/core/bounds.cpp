#include "core/bounds.hpp"

#include "core/besov.hpp"

#include <algorithm>
#include <cmath>

namespace aniso::bounds {

double rate_exponent(double alpha0, int d) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("rate_exponent: alpha0 must be positive");
  if (d < 1) throw std::invalid_argument("rate_exponent: d must be >= 1");
  return 2.0 * alpha0 / (2.0 * alpha0 + d);
}

double profile_alpha0(const SmoothnessProfile& profile) {
  if (profile.active_subset)
    return besov::effective_smoothness_subset(profile.alpha, *profile.active_subset,
                                              profile.dim());
  return besov::effective_smoothness(profile.alpha);
}

RateSchedule make_schedule(const SmoothnessProfile& profile, double c1,
                           const std::vector<double>& c2) {
  const int d = profile.dim();
  if (!(c1 > 0.0)) throw std::invalid_argument("make_schedule: c1 must be positive");
  if (static_cast<int>(c2.size()) != d)
    throw std::invalid_argument("make_schedule: c2 size mismatch");
  for (double c : c2)
    if (!(c > 0.0)) throw std::invalid_argument("make_schedule: c2 must be positive");

  const double alpha0 = profile_alpha0(profile);
  std::vector<bool> active(d, true);
  if (profile.active_subset) {
    active.assign(d, false);
    for (int i : *profile.active_subset) active[i] = true;
  }

  RateSchedule s;
  s.c1 = c1;
  s.c2 = c2;
  s.alpha0 = alpha0;
  s.exponent_lambda = -1.0;
  s.exponents_gamma.resize(d);
  for (int i = 0; i < d; ++i)
    s.exponents_gamma[i] =
        active[i] ? -alpha0 / (profile.alpha[i] * (2.0 * alpha0 + d)) : 0.0;
  return s;
}

SchedulePoint schedule_at(const RateSchedule& schedule, long n) {
  if (n < 1) throw std::invalid_argument("schedule_at: n must be >= 1");
  const int d = static_cast<int>(schedule.c2.size());
  Vector gamma(d);
  bool clamped = false;
  for (int i = 0; i < d; ++i) {
    double g = schedule.exponents_gamma[i] == 0.0
                   ? 1.0
                   : schedule.c2[i] * std::pow(static_cast<double>(n),
                                               schedule.exponents_gamma[i]);
    if (g > 1.0) {
      g = 1.0;
      clamped = true;
    }
    gamma[i] = g;
  }
  return SchedulePoint{schedule.c1 / static_cast<double>(n), Bandwidths(gamma), clamped};
}

double entropy_bound(int i, double p, const Bandwidths& bw, double capacity_constant,
                     int d) {
  if (i < 1) throw std::invalid_argument("entropy_bound: index must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("entropy_bound: p must be in (0,1)");
  if (!(capacity_constant > 0.0))
    throw std::invalid_argument("entropy_bound: capacity constant must be positive");
  if (d != bw.dim()) throw std::invalid_argument("entropy_bound: dimension mismatch");
  const double inv_p = 1.0 / p;
  return std::pow(3.0 * capacity_constant, inv_p) *
         std::pow((d + 1.0) / (M_E * p), (d + 1.0) * inv_p) *
         std::pow(bw.product(), -inv_p) * std::pow(static_cast<double>(i), -inv_p);
}

double entropy_coefficient_rates(double p, double capacity_constant, int d,
                                 const Bandwidths& bw) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("entropy_coefficient_rates: p must be in (0,1)");
  const double inv_2p = 0.5 / p;
  return std::pow(3.0 * capacity_constant, inv_2p) *
         std::pow((d + 1.0) / (M_E * p), (d + 1.0) * inv_2p) *
         std::pow(bw.product(), -inv_2p);
}

double kp_constant(double p, double m_bound) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("kp_constant: p must be in (0,1)");
  if (!(m_bound > 0.0)) throw std::invalid_argument("kp_constant: M must be positive");
  const double sqrt2 = std::sqrt(2.0);
  const double cp = (sqrt2 - 1.0) / (sqrt2 - std::pow(2.0, (2.0 * p - 1.0) / (2.0 * p))) *
                    (1.0 - p) / p;
  const double cp_pow = std::pow(cp, p);
  const double c1 = 2.0 * std::sqrt(std::log(256.0)) * cp_pow /
                    ((sqrt2 - 1.0) * (1.0 - p) * std::pow(2.0, 0.5 * p));
  const double c2 = std::pow(8.0 * std::sqrt(std::log(16.0)) * cp_pow /
                                 ((sqrt2 - 1.0) * (1.0 - p) * std::pow(4.0, p)),
                             2.0 / (1.0 + p));
  const double m2 = m_bound * m_bound;
  return std::max({43200.0 * std::pow(2.0, 2.0 * p) * m2 * c1 * c1,
                   360.0 * std::pow(480.0, p) * m2 * std::pow(c2, 1.0 + p), 8.0 * m2});
}

double oracle_rhs(double approx_term, const OracleConstants& constants, double lambda,
                  long n) {
  if (!(lambda > 0.0)) throw std::invalid_argument("oracle_rhs: lambda must be positive");
  if (n < 1) throw std::invalid_argument("oracle_rhs: n must be >= 1");
  if (!(constants.b0 >= 4.0 * constants.m * constants.m))
    throw std::invalid_argument("oracle_rhs: B0 must be >= 4 M^2");
  if (!(constants.rho >= 1.0)) throw std::invalid_argument("oracle_rhs: rho must be >= 1");
  if (!(constants.a > 0.0))
    throw std::invalid_argument("oracle_rhs: entropy coefficient must be positive");
  const double nn = static_cast<double>(n);
  const double sample_term = kp_constant(constants.p, constants.m) *
                             std::pow(constants.a, 2.0 * constants.p) /
                             (std::pow(lambda, constants.p) * nn);
  const double tail_term = (3456.0 * constants.m * constants.m + 15.0 * constants.b0) *
                           (1.0 + std::log(3.0)) * constants.rho / nn;
  return 9.0 * approx_term + sample_term + tail_term;
}

double approximation_error_bound(double lambda, const Bandwidths& bw,
                                 const SmoothnessProfile& profile, double c1, double cs) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("approximation_error_bound: lambda must be >= 0");
  if (!(c1 > 0.0) || !(cs > 0.0))
    throw std::invalid_argument("approximation_error_bound: constants must be positive");
  if (profile.dim() != bw.dim())
    throw std::invalid_argument("approximation_error_bound: dimension mismatch");
  double tail = 0.0;
  for (int i = 0; i < bw.dim(); ++i)
    tail += std::pow(bw[i], 2.0 * profile.alpha[i]);
  return c1 * lambda / bw.product() + cs * tail;
}

Bandwidths optimal_bandwidths(double lambda, long n, double p,
                              const SmoothnessProfile& profile) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("optimal_bandwidths: lambda must be positive");
  if (n < 1) throw std::invalid_argument("optimal_bandwidths: n must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("optimal_bandwidths: p must be in (0,1)");
  const int d = profile.dim();
  for (double a : profile.alpha)
    if (!(a > 0.0))
      throw std::invalid_argument("optimal_bandwidths: smoothness must be positive");

  const double alpha0 = besov::effective_smoothness(profile.alpha);
  // With 2 alpha_i gamma_i^(2 alpha_i) = gamma_0^(2 alpha_0), the product of the
  // bandwidths is c_alpha * gamma_0^d, and each stationarity equation reduces to
  // gamma_0^(2 alpha_0 + d) = (lambda + lambda^(-p)/n) / c_alpha.
  double log_c_alpha = 0.0;
  for (double a : profile.alpha) log_c_alpha += -std::log(2.0 * a) / (2.0 * a);
  const double drive = lambda + std::pow(lambda, -p) / static_cast<double>(n);
  const double log_target = std::log(drive) - log_c_alpha;
  const double power = 2.0 * alpha0 + d;

  const auto residual = [&](double log_g0) { return power * log_g0 - log_target; };
  double lo = std::log(1e-12), hi = std::log(1e12);
  if (residual(lo) > 0.0 || residual(hi) < 0.0)
    throw numerical_error("optimal_bandwidths: bisection bracket failure");
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double log_g0 = 0.5 * (lo + hi);

  Vector gamma(d);
  for (int i = 0; i < d; ++i) {
    const double a = profile.alpha[i];
    gamma[i] = std::exp((2.0 * alpha0 * log_g0 - std::log(2.0 * a)) / (2.0 * a));
  }
  return Bandwidths(gamma);
}

}  // namespace aniso::bounds
