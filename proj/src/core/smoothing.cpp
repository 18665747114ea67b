#include "core/smoothing.hpp"

#include "core/besov.hpp"
#include "core/quadrature.hpp"

#include <cmath>

namespace aniso::smoothing {

int default_order(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("default_order: alpha must be positive");
  return static_cast<int>(std::floor(alpha)) + 1;
}

double kernel_1d(double x, double gamma, int order) {
  if (!(gamma > 0.0)) throw std::invalid_argument("kernel_1d: gamma must be positive");
  if (order < 1) throw std::invalid_argument("kernel_1d: order must be >= 1");
  double sum = 0.0;
  for (int j = 1; j <= order; ++j) {
    const double sign = (j & 1) ? 1.0 : -1.0;  // (-1)^(1-j)
    const double scale = j * gamma;
    sum += besov::binomial(order, j) * sign / scale * std::exp(-2.0 * x * x / (scale * scale));
  }
  return std::sqrt(2.0 / M_PI) * sum;
}

double kernel_product(const Vector& x, const SmootherSpec& spec) {
  if (x.size() != spec.dim())
    throw std::invalid_argument("kernel_product: dimension mismatch");
  double value = 1.0;
  for (int i = 0; i < spec.dim(); ++i)
    value *= kernel_1d(x[i], spec.bandwidths[i], spec.orders[i]);
  return value;
}

Smoothed::Smoothed(Callable f, SmootherSpec spec, Box support, ConvolutionQuad quad)
    : f_(std::move(f)), spec_(std::move(spec)), support_(std::move(support)), quad_(quad) {
  const int d = spec_.dim();
  if (d > 3) throw std::invalid_argument("Smoothed: supported for d <= 3");
  if (support_.dim() != d) throw std::invalid_argument("Smoothed: support dimension mismatch");
  if (quad_.nodes_per_dim < 1) throw std::invalid_argument("Smoothed: need >= 1 node");

  // Enumerate the signed Gaussian mixture components j in prod {1..r_i}.
  std::vector<int> sizes(d);
  for (int i = 0; i < d; ++i) sizes[i] = spec_.orders[i];
  quad::for_each_multi_index(sizes, [&](const std::vector<int>& idx) {
    Component c;
    c.weight = 1.0;
    c.sd.resize(d);
    for (int i = 0; i < d; ++i) {
      const int j = idx[i] + 1;
      const double sign = (j & 1) ? 1.0 : -1.0;
      c.weight *= besov::binomial(spec_.orders[i], j) * sign;
      c.sd[i] = 0.5 * j * spec_.bandwidths[i];
    }
    components_.push_back(std::move(c));
  });
}

double Smoothed::operator()(const Vector& x) const {
  const int d = spec_.dim();
  if (x.size() != d) throw std::invalid_argument("Smoothed: dimension mismatch");
  const auto& rule = quad::gauss_hermite(quad_.nodes_per_dim);
  const double norm = std::pow(M_PI, -0.5 * d);  // Gauss-Hermite mass of a density

  double value = 0.0;
  Vector t(d);
  const std::vector<int> sizes(d, quad_.nodes_per_dim);
  for (const Component& c : components_) {
    double integral = 0.0;
    quad::for_each_multi_index(sizes, [&](const std::vector<int>& idx) {
      double w = 1.0;
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        t[i] = x[i] + c.sd[i] * M_SQRT2 * rule.nodes[idx[i]];
        w *= rule.weights[idx[i]];
        inside = inside && t[i] >= support_.lo[i] && t[i] <= support_.hi[i];
      }
      if (!inside) return;  // f is extended by zero outside its support
      const double v = f_(t);
      if (!std::isfinite(v)) throw numerical_error("Smoothed: non-finite target sample");
      integral += w * v;
    });
    value += c.weight * norm * integral;
  }
  return value;
}

Smoothed convolve(Callable f, const SmootherSpec& spec, const Box& support,
                  const ConvolutionQuad& quad) {
  return Smoothed(std::move(f), spec, support, quad);
}

double sup_bound_constant(const std::vector<int>& orders) {
  double prod = 1.0;
  for (int r : orders) {
    if (r < 1) throw std::invalid_argument("sup_bound_constant: orders must be >= 1");
    prod *= std::pow(2.0, r) - 1.0;
  }
  return prod;
}

double rkhs_bound_convolution(double f_l2_norm, const SmootherSpec& spec) {
  if (!(f_l2_norm >= 0.0))
    throw std::invalid_argument("rkhs_bound_convolution: norm must be nonnegative");
  const int d = spec.dim();
  double value = std::pow(M_PI, -0.25 * d) * f_l2_norm;
  for (int i = 0; i < d; ++i)
    value *= (std::pow(2.0, spec.orders[i]) - 1.0) / std::sqrt(spec.bandwidths[i]);
  return value;
}

double smoothing_error_constant(int order, double q) {
  if (order < 1) throw std::invalid_argument("smoothing_error_constant: order must be >= 1");
  if (!(q >= 1.0)) throw std::invalid_argument("smoothing_error_constant: q must be >= 1");
  const int top = static_cast<int>(std::ceil(order * q));
  double sum = 0.0;
  for (int j = 0; j <= top; ++j) {
    double half_factorial = 1.0;  // prod_{m=1}^{j} (m - 1/2), empty product at j = 0
    for (int m = 1; m <= j; ++m) half_factorial *= m - 0.5;
    sum += besov::binomial(top, j) * std::pow(2.0, 0.5 * (j - 1)) * std::sqrt(half_factorial);
  }
  return sum;
}

}  // namespace aniso::smoothing
