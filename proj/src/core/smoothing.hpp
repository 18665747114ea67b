#ifndef ANISO_CORE_SMOOTHING_HPP
#define ANISO_CORE_SMOOTHING_HPP

#include "core/types.hpp"

#include <functional>

namespace aniso::smoothing {

using Callable = std::function<double(const Vector&)>;

/// Per-dimension difference orders plus the bandwidths of the target RKHS.
struct SmootherSpec {
  std::vector<int> orders;
  Bandwidths bandwidths;

  SmootherSpec(std::vector<int> orders_, Bandwidths bandwidths_)
      : orders(std::move(orders_)), bandwidths(std::move(bandwidths_)) {
    if (static_cast<int>(orders.size()) != bandwidths.dim())
      throw std::invalid_argument("SmootherSpec: orders/bandwidths mismatch");
    for (int r : orders)
      if (r < 1) throw std::invalid_argument("SmootherSpec: orders must be >= 1");
  }

  int dim() const { return bandwidths.dim(); }
};

/// Default difference order floor(alpha) + 1 for a declared smoothness.
int default_order(double alpha);

/// One-dimensional smoothing kernel: a signed mixture of r Gaussian densities,
/// sqrt(2/pi) sum_{j=1}^{r} C(r,j) (-1)^(1-j) / (j gamma) exp(-2 x^2 / (j gamma)^2).
/// Total mass is 1 for every order.
double kernel_1d(double x, double gamma, int order);

/// Product kernel prod_i kernel_1d(x_i, gamma_i, r_i).
double kernel_product(const Vector& x, const SmootherSpec& spec);

struct ConvolutionQuad {
  int nodes_per_dim = 40;
};

/// The smoothed target K * f: per evaluation point, each Gaussian mixture
/// component is integrated by a tensor Gauss-Hermite rule with per-dimension
/// standard deviation j_i gamma_i / 2, and the components are combined with
/// their signed binomial weights. f is extended by zero outside its support box.
class Smoothed {
public:
  Smoothed(Callable f, SmootherSpec spec, Box support, ConvolutionQuad quad = {});

  /// Throws numerical_error when f returns a non-finite sample.
  double operator()(const Vector& x) const;

  int dim() const { return spec_.dim(); }

private:
  Callable f_;
  SmootherSpec spec_;
  Box support_;
  ConvolutionQuad quad_;
  struct Component {
    double weight;
    std::vector<double> sd;
  };
  std::vector<Component> components_;
};

/// Convenience wrapper returning the smoothed target as a plain callable.
Smoothed convolve(Callable f, const SmootherSpec& spec, const Box& support,
                  const ConvolutionQuad& quad = {});

/// prod_i (2^(r_i) - 1): the sup-norm inflation of the smoother.
double sup_bound_constant(const std::vector<int>& orders);

/// RKHS-norm bound of the smoothed target:
/// pi^(-d/4) prod (2^(r_i)-1) ||f||_L2 prod gamma_i^(-1/2).
double rkhs_bound_convolution(double f_l2_norm, const SmootherSpec& spec);

/// Smoothing-error constant sum_{j=0}^{ceil(r q)} C(ceil(r q), j) 2^((j-1)/2)
/// (prod_{m=1}^{j} (m - 1/2))^(1/2); the j = 0 product is empty (= 1).
double smoothing_error_constant(int order, double q);

}  // namespace aniso::smoothing

#endif
