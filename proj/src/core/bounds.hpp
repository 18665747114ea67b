#ifndef ANISO_CORE_BOUNDS_HPP
#define ANISO_CORE_BOUNDS_HPP

#include "core/types.hpp"

namespace aniso::bounds {

/// n-exponent of the excess-risk rate, 2 alpha_0 / (2 alpha_0 + d).
double rate_exponent(double alpha0, int d);

/// Effective smoothness of a profile, honoring its active subset when present
/// (the divisor stays the full dimension).
double profile_alpha0(const SmoothnessProfile& profile);

/// The lambda/bandwidth schedule of the learning-rate theorem:
/// lambda_n = c1 / n and gamma_{i,n} = c2_i n^(-alpha0 / (alpha_i (2 alpha0 + d))).
/// Dimensions outside the profile's active subset are held at exactly 1.
struct RateSchedule {
  double c1;
  std::vector<double> c2;
  double alpha0;
  double exponent_lambda;               // always -1
  std::vector<double> exponents_gamma;  // 0 for dimensions outside the subset
};

RateSchedule make_schedule(const SmoothnessProfile& profile, double c1,
                           const std::vector<double>& c2);

struct SchedulePoint {
  double lambda;
  Bandwidths gamma;
  bool clamped;  // true when some gamma_i had to be clamped into (0, 1]
};

/// Evaluates the schedule at sample size n, clamping bandwidths into (0, 1].
SchedulePoint schedule_at(const RateSchedule& schedule, long n);

/// Entropy-number bound of the RKHS unit ball in the sup norm:
/// (3K)^(1/p) ((d+1)/(e p))^((d+1)/p) (prod gamma_i)^(-1/p) i^(-1/p).
double entropy_bound(int i, double p, const Bandwidths& bw, double capacity_constant, int d);

/// Entropy coefficient in the 1/(2p) convention used by the rate machinery:
/// (3K)^(1/(2p)) ((d+1)/(e p))^((d+1)/(2p)) (prod gamma_i)^(-1/(2p)).
double entropy_coefficient_rates(double p, double capacity_constant, int d,
                                 const Bandwidths& bw);

/// The oracle-inequality constant K(p): with
///   C_p   = (sqrt(2)-1) / (sqrt(2) - 2^((2p-1)/(2p))) * (1-p)/p,
///   C1(p) = 2 sqrt(log 256) C_p^p / ((sqrt(2)-1)(1-p) 2^(p/2)),
///   C2(p) = (8 sqrt(log 16) C_p^p / ((sqrt(2)-1)(1-p) 4^p))^(2/(1+p)),
/// returns max{43200 * 2^(2p) M^2 C1(p)^2, 360 * 480^p M^2 C2(p)^(1+p), 8 M^2}.
double kp_constant(double p, double m_bound);

/// Constants of the oracle inequality's right-hand side.
struct OracleConstants {
  double b0;   // >= 4 M^2
  double m;    // response bound M > 0
  double p;    // in (0, 1)
  double rho;  // confidence parameter >= 1
  double a;    // entropy coefficient > 0
};

/// Right-hand side of the oracle inequality:
/// 9 * approx + K(p) a^(2p) / (lambda^p n) + (3456 M^2 + 15 B0)(1 + log 3) rho / n.
double oracle_rhs(double approx_term, const OracleConstants& constants, double lambda,
                  long n);

/// Approximation-error bound C1 lambda prod gamma_i^(-1) + Cs sum gamma_i^(2 alpha_i).
double approximation_error_bound(double lambda, const Bandwidths& bw,
                                 const SmoothnessProfile& profile, double c1, double cs);

/// Minimizer of g(gamma) = lambda prod gamma_i^(-1) + sum gamma_i^(2 alpha_i)
///                        + (prod gamma_i)^(-1) lambda^(-p) / n,
/// found by reducing the stationarity system 2 alpha_j gamma_j^(2 alpha_j) =
/// lambda prod gamma^(-1) + (prod gamma)^(-1) lambda^(-p)/n to one scalar
/// unknown gamma_0 (via 2 alpha_i gamma_i^(2 alpha_i) = gamma_0^(2 alpha_0))
/// and bisecting on gamma_0 to relative tolerance 1e-12.
Bandwidths optimal_bandwidths(double lambda, long n, double p,
                              const SmoothnessProfile& profile);

}  // namespace aniso::bounds

#endif
