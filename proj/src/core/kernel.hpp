#ifndef ANISO_CORE_KERNEL_HPP
#define ANISO_CORE_KERNEL_HPP

#include "core/types.hpp"

#include <functional>

namespace aniso::kernel {

/// One-dimensional Gaussian kernel exp(-(x-y)^2 / gamma^2).
double eval_1d(double x, double y, double gamma);

/// Anisotropic Gaussian kernel exp(-sum_j (x_j-y_j)^2 / gamma_j^2).
/// Value lies in (0, 1]; throws std::invalid_argument on dimension mismatch.
double eval(const Vector& x, const Vector& y, const Bandwidths& bw);

/// Kernel matrix of a point set (one point per row). Symmetric, unit diagonal,
/// entries computed pairwise with the same arithmetic as eval(), so the result
/// is independent of any row partitioning.
Matrix gram(const Matrix& points, const Bandwidths& bw);

/// n-th orthonormal basis function of the one-dimensional RKHS:
/// sqrt(2^n / (gamma^(2n) n!)) * z^n * exp(-z^2 / gamma^2).
/// The coefficient is accumulated in the log domain so large n do not overflow.
double onb_eval_1d(int n, double gamma, double z);

/// Tensor-product basis function prod_j e_{j, idx[j]}(z_j).
double onb_eval(const MultiIndex& idx, const Bandwidths& bw, const Vector& z);

/// Partial basis reconstruction of the kernel: the sum of e_n(x) e_n(y) over
/// all multi-indices with every component < truncation, computed as a product
/// of one-dimensional partial sums. Converges to eval() as truncation grows.
double from_onb(const Vector& x, const Vector& y, const Bandwidths& bw, int truncation);

/// Canonical RKHS norm of a finite expansion, sqrt(a^T K a). Tiny negative
/// quadratic forms (>= -1e-10) are clamped to zero; anything more negative
/// raises numerical_error.
double rkhs_norm(const KernelExpansion& f);

struct QuadratureSpec {
  int nodes_per_dim = 64;
};

/// Weighted-L2 integral form of the H_gamma norm,
///   (2/pi)^(d/2) (prod gamma_i)^(-1) (int |f|^2 exp(-sum 4 x_i^2/gamma_i^2) dx)^(1/2),
/// evaluated by tensor Gauss-Hermite quadrature (d <= 4). Diagnostic only: this
/// integral form disagrees with the expansion norm by a bandwidth-dependent
/// factor (it assigns the zeroth basis function norm ~0.68 at gamma=1, not 1),
/// so rkhs_norm() is the canonical evaluator and the two are never asserted equal.
double rkhs_norm_integral(const std::function<double(const Vector&)>& f,
                          const Bandwidths& bw, const QuadratureSpec& quad = {});

}  // namespace aniso::kernel

#endif
