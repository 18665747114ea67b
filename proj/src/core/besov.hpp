#ifndef ANISO_CORE_BESOV_HPP
#define ANISO_CORE_BESOV_HPP

#include "core/types.hpp"

#include <functional>

namespace aniso::besov {

using Callable = std::function<double(const Vector&)>;

/// Exact binomial coefficient as a double (n <= 56 stays exact).
double binomial(int n, int k);

/// r-th forward difference sum_{j=0}^{r} C(r,j) (-1)^(r-j) f(x + j h).
/// Returns 0 when the segment [x, x + r h] leaves [lo, hi] (the out-of-domain
/// convention of the difference operator).
double forward_difference(const std::function<double(double)>& f, double x, double h,
                          int r, double lo, double hi);

enum class ModulusNorm { sup, lp };

/// How a directional modulus of smoothness is estimated. Suprema over the
/// ambient space are replaced by deterministic anchors (fixed-seed contexts for
/// the off-direction coordinates) and a fixed magnitude grid for the shift;
/// inner norms use an inclusive grid (sup) or fixed-seed stratified samples (L_p).
struct ModulusQuery {
  int direction = 0;  // dimension the difference acts on (0-based)
  int order = 1;      // difference order r >= 1
  double scale = 0.0; // shift bound t > 0
  ModulusNorm norm = ModulusNorm::sup;
  double p = 2.0;     // L_p exponent, norm == lp only
  int anchor_count = 64;
  int h_count = 64;
  int sup_grid = 256;
  int lp_samples = 1024;
};

/// Modulus of smoothness at each requested scale, all scales served from one
/// shared shift grid with a running max, so the result is nondecreasing in the
/// scale exactly. Scales themselves are inserted into the grid. The domain box
/// must be bounded.
std::vector<double> modulus_profile(const Callable& f, const ModulusQuery& q,
                                    const Box& domain, const std::vector<double>& scales);

/// Single-scale modulus of smoothness (q.scale must be positive).
double modulus(const Callable& f, const ModulusQuery& q, const Box& domain);

/// Harmonic mean of the per-dimension smoothness: ((1/d) sum 1/alpha_i)^(-1).
double effective_smoothness(const std::vector<double>& alpha);

/// Subset variant ((1/d) sum_{i in subset} 1/alpha_i)^(-1); the divisor stays
/// the full dimension d. Subset indices are 0-based.
double effective_smoothness_subset(const std::vector<double>& alpha,
                                   const std::vector<int>& subset, int d);

/// a_i = alpha_0 / alpha_i.
std::vector<double> anisotropy_vector(const std::vector<double>& alpha);

/// Slope of log modulus against log scale over the grid — estimates
/// min(alpha_i, order) for generalized-Lipschitz targets. Scales whose modulus
/// falls below 1e-12 are dropped; if fewer than two points survive the fit is
/// degenerate and degenerate_fit_error is raised.
double estimate_smoothness_exponent(const Callable& f, int direction,
                                    const std::vector<double>& t_grid, int order,
                                    const Box& domain, ModulusQuery base = {});

}  // namespace aniso::besov

#endif
