#include "core/besov.hpp"

#include "core/rng.hpp"

#include <algorithm>
#include <cmath>

namespace aniso::besov {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return std::round(c);
}

double forward_difference(const std::function<double(double)>& f, double x, double h,
                          int r, double lo, double hi) {
  if (r < 1) throw std::invalid_argument("forward_difference: order must be >= 1");
  const double end = x + r * h;
  if (std::min(x, end) < lo || std::max(x, end) > hi) return 0.0;
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) {
    const double sign = ((r - j) & 1) ? -1.0 : 1.0;
    sum += sign * binomial(r, j) * f(x + j * h);
  }
  return sum;
}

namespace {

void validate_query(const ModulusQuery& q, const Box& domain) {
  if (q.direction < 0 || q.direction >= domain.dim())
    throw std::invalid_argument("modulus: direction out of range");
  if (q.order < 1) throw std::invalid_argument("modulus: order must be >= 1");
  if (q.anchor_count < 1 || q.h_count < 1 || q.sup_grid < 2 || q.lp_samples < 1)
    throw std::invalid_argument("modulus: sample budgets must be positive");
  if (q.norm == ModulusNorm::lp && !(q.p > 0.0))
    throw std::invalid_argument("modulus: L_p exponent must be positive");
  for (int k = 0; k < domain.dim(); ++k)
    if (!std::isfinite(domain.lo[k]) || !std::isfinite(domain.hi[k]))
      throw std::invalid_argument("modulus: domain box must be bounded");
}

// Norm over the scanned coordinate of the r-th difference, with the other
// coordinates pinned at the anchor.
double directional_norm(const Callable& f, const ModulusQuery& q, const Box& domain,
                        const Vector& anchor, double h) {
  const int i = q.direction;
  const double lo = domain.lo[i];
  const double hi = domain.hi[i];
  Vector point = anchor;
  const auto f_1d = [&](double y) {
    point[i] = y;
    return f(point);
  };
  if (q.norm == ModulusNorm::sup) {
    double best = 0.0;
    const double step = (hi - lo) / (q.sup_grid - 1);
    for (int k = 0; k < q.sup_grid; ++k) {
      const double x = lo + k * step;
      best = std::max(best, std::abs(forward_difference(f_1d, x, h, q.order, lo, hi)));
    }
    return best;
  }
  // Stratified fixed-seed samples over [lo, hi].
  static const rng::Counter jitter(0x6c705f6d6f64ull, 0);
  const double len = hi - lo;
  double acc = 0.0;
  for (int k = 0; k < q.lp_samples; ++k) {
    const double x = lo + (k + jitter.uniform(k)) * len / q.lp_samples;
    acc += std::pow(std::abs(forward_difference(f_1d, x, h, q.order, lo, hi)), q.p);
  }
  return std::pow(len * acc / q.lp_samples, 1.0 / q.p);
}

std::vector<Vector> make_anchors(const ModulusQuery& q, const Box& domain) {
  const int d = domain.dim();
  if (d == 1) return {Vector::Zero(1)};
  std::vector<Vector> anchors;
  anchors.reserve(q.anchor_count);
  for (int a = 0; a < q.anchor_count; ++a) {
    Vector x(d);
    for (int k = 0; k < d; ++k) {
      const rng::Counter ctx(0x616e63686f72ull, static_cast<std::uint64_t>(k));
      x[k] = domain.lo[k] + ctx.uniform(a) * (domain.hi[k] - domain.lo[k]);
    }
    anchors.push_back(std::move(x));
  }
  return anchors;
}

}  // namespace

std::vector<double> modulus_profile(const Callable& f, const ModulusQuery& q,
                                    const Box& domain, const std::vector<double>& scales) {
  validate_query(q, domain);
  if (scales.empty()) return {};
  for (double t : scales)
    if (!(t > 0.0)) throw std::invalid_argument("modulus: scales must be positive");
  const double t_max = *std::max_element(scales.begin(), scales.end());

  std::vector<double> grid;
  grid.reserve(q.h_count + scales.size());
  for (int k = 1; k <= q.h_count; ++k) grid.push_back(t_max * k / q.h_count);
  grid.insert(grid.end(), scales.begin(), scales.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::vector<Vector> anchors = make_anchors(q, domain);

  // Running max over the shared shift grid makes omega(t) nondecreasing exactly.
  std::vector<double> prefix_max(grid.size());
  double running = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double h = grid[g];
    for (const Vector& anchor : anchors) {
      running = std::max(running, directional_norm(f, q, domain, anchor, h));
      running = std::max(running, directional_norm(f, q, domain, anchor, -h));
    }
    prefix_max[g] = running;
  }

  std::vector<double> out;
  out.reserve(scales.size());
  for (double t : scales) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    out.push_back(it == grid.begin() ? 0.0 : prefix_max[(it - grid.begin()) - 1]);
  }
  return out;
}

double modulus(const Callable& f, const ModulusQuery& q, const Box& domain) {
  if (!(q.scale > 0.0)) throw std::invalid_argument("modulus: scale must be positive");
  return modulus_profile(f, q, domain, {q.scale})[0];
}

double effective_smoothness(const std::vector<double>& alpha) {
  if (alpha.empty()) throw std::invalid_argument("effective_smoothness: empty profile");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0))
      throw std::invalid_argument("effective_smoothness: smoothness must be positive");
    sum += 1.0 / a;
  }
  return static_cast<double>(alpha.size()) / sum;
}

double effective_smoothness_subset(const std::vector<double>& alpha,
                                   const std::vector<int>& subset, int d) {
  if (subset.empty())
    throw std::invalid_argument("effective_smoothness_subset: empty subset");
  if (static_cast<int>(alpha.size()) != d)
    throw std::invalid_argument("effective_smoothness_subset: profile/dimension mismatch");
  double sum = 0.0;
  for (int i : subset) {
    if (i < 0 || i >= d)
      throw std::invalid_argument("effective_smoothness_subset: index out of range");
    if (!(alpha[i] > 0.0))
      throw std::invalid_argument("effective_smoothness_subset: smoothness must be positive");
    sum += 1.0 / alpha[i];
  }
  return static_cast<double>(d) / sum;
}

std::vector<double> anisotropy_vector(const std::vector<double>& alpha) {
  const double alpha0 = effective_smoothness(alpha);
  std::vector<double> a(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) a[i] = alpha0 / alpha[i];
  return a;
}

double estimate_smoothness_exponent(const Callable& f, int direction,
                                    const std::vector<double>& t_grid, int order,
                                    const Box& domain, ModulusQuery base) {
  if (t_grid.size() < 3)
    throw std::invalid_argument("estimate_smoothness_exponent: need >= 3 scales");
  base.direction = direction;
  base.order = order;
  const std::vector<double> omega = modulus_profile(f, base, domain, t_grid);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (omega[k] < 1e-12) continue;
    const double x = std::log(t_grid[k]);
    const double y = std::log(omega[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2)
    throw degenerate_fit_error(
        "estimate_smoothness_exponent: modulus vanishes on the scale grid");
  const double det = m * sxx - sx * sx;
  if (std::abs(det) < 1e-300)
    throw degenerate_fit_error("estimate_smoothness_exponent: collinear scales");
  return (m * sxy - sx * sy) / det;
}

}  // namespace aniso::besov
