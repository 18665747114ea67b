#include "core/kernel.hpp"

#include "core/quadrature.hpp"

#include <cmath>
#include <vector>

namespace aniso::kernel {

namespace {

// Shared squared-distance kernel arithmetic; eval() and gram() must agree bitwise.
inline double scaled_sqdist(const double* x, const double* y, const double* inv_gamma_sq,
                            int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double t = x[k] - y[k];
    s += t * t * inv_gamma_sq[k];
  }
  return s;
}

std::vector<double> inverse_gamma_squared(const Bandwidths& bw) {
  std::vector<double> inv(bw.dim());
  for (int k = 0; k < bw.dim(); ++k) inv[k] = 1.0 / (bw[k] * bw[k]);
  return inv;
}

}  // namespace

double eval_1d(double x, double y, double gamma) {
  const double t = x - y;
  return std::exp(-(t * t) * (1.0 / (gamma * gamma)));
}

double eval(const Vector& x, const Vector& y, const Bandwidths& bw) {
  if (x.size() != bw.dim() || y.size() != bw.dim())
    throw std::invalid_argument("kernel::eval: dimension mismatch");
  const std::vector<double> inv = inverse_gamma_squared(bw);
  return std::exp(-scaled_sqdist(x.data(), y.data(), inv.data(), bw.dim()));
}

Matrix gram(const Matrix& points, const Bandwidths& bw) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (n < 1) throw std::invalid_argument("kernel::gram: empty point set");
  if (d != bw.dim()) throw std::invalid_argument("kernel::gram: dimension mismatch");

  const std::vector<double> inv = inverse_gamma_squared(bw);
  // Row-major copy so pairwise distances stream contiguously.
  std::vector<double> pts(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) pts[static_cast<std::size_t>(i) * d + k] = points(i, k);

  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    const double* xi = pts.data() + static_cast<std::size_t>(i) * d;
    for (int j = i + 1; j < n; ++j) {
      const double* xj = pts.data() + static_cast<std::size_t>(j) * d;
      const double v = std::exp(-scaled_sqdist(xi, xj, inv.data(), d));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double onb_eval_1d(int n, double gamma, double z) {
  if (n < 0) throw std::invalid_argument("kernel::onb_eval_1d: order must be >= 0");
  const double decay = -(z * z) * (1.0 / (gamma * gamma));
  if (n == 0) return std::exp(decay);
  if (z == 0.0) return 0.0;
  const double log_coef = 0.5 * (n * M_LN2 - 2.0 * n * std::log(gamma) - std::lgamma(n + 1.0));
  const double sign = (z < 0.0 && (n & 1)) ? -1.0 : 1.0;
  return sign * std::exp(log_coef + n * std::log(std::abs(z)) + decay);
}

double onb_eval(const MultiIndex& idx, const Bandwidths& bw, const Vector& z) {
  if (idx.dim() != bw.dim() || z.size() != bw.dim())
    throw std::invalid_argument("kernel::onb_eval: dimension mismatch");
  double value = 1.0;
  for (int k = 0; k < bw.dim(); ++k) value *= onb_eval_1d(idx.n[k], bw[k], z[k]);
  return value;
}

double from_onb(const Vector& x, const Vector& y, const Bandwidths& bw, int truncation) {
  if (x.size() != bw.dim() || y.size() != bw.dim())
    throw std::invalid_argument("kernel::from_onb: dimension mismatch");
  if (truncation < 1)
    throw std::invalid_argument("kernel::from_onb: truncation must be >= 1");
  double value = 1.0;
  for (int k = 0; k < bw.dim(); ++k) {
    double partial = 0.0;
    for (int n = 0; n < truncation; ++n)
      partial += onb_eval_1d(n, bw[k], x[k]) * onb_eval_1d(n, bw[k], y[k]);
    value *= partial;
  }
  return value;
}

double rkhs_norm(const KernelExpansion& f) {
  if (f.size() < 1)
    throw std::invalid_argument("kernel::rkhs_norm: empty expansion");
  const Matrix k = gram(f.centers, f.bandwidths);
  const double q = f.coefficients.dot(k * f.coefficients);
  if (q < -1e-10)
    throw numerical_error("kernel::rkhs_norm: quadratic form below -1e-10");
  return std::sqrt(std::max(q, 0.0));
}

double rkhs_norm_integral(const std::function<double(const Vector&)>& f,
                          const Bandwidths& bw, const QuadratureSpec& quad) {
  const int d = bw.dim();
  if (d > 4)
    throw std::invalid_argument("kernel::rkhs_norm_integral: supported for d <= 4");
  if (quad.nodes_per_dim < 1)
    throw std::invalid_argument("kernel::rkhs_norm_integral: need >= 1 node");
  const auto& rule = quad::gauss_hermite(quad.nodes_per_dim);

  // Substituting t_i = 2 x_i / gamma_i absorbs the weight exp(-4 x_i^2/gamma_i^2)
  // into the Gauss-Hermite weight exp(-t_i^2), with Jacobian prod gamma_i / 2.
  double integral = 0.0;
  Vector x(d);
  quad::for_each_multi_index(std::vector<int>(d, quad.nodes_per_dim),
                             [&](const std::vector<int>& idx) {
                               double w = 1.0;
                               for (int k = 0; k < d; ++k) {
                                 x[k] = 0.5 * bw[k] * rule.nodes[idx[k]];
                                 w *= rule.weights[idx[k]];
                               }
                               const double v = f(x);
                               if (!std::isfinite(v))
                                 throw numerical_error(
                                     "kernel::rkhs_norm_integral: non-finite integrand");
                               integral += w * v * v;
                             });
  double jacobian = 1.0;
  for (int k = 0; k < d; ++k) jacobian *= 0.5 * bw[k];
  const double weighted_l2 = std::sqrt(std::max(integral * jacobian, 0.0));
  return std::pow(2.0 / M_PI, 0.5 * d) / bw.product() * weighted_l2;
}

}  // namespace aniso::kernel
