#include "core/synth.hpp"

#include "core/rng.hpp"

#include <algorithm>
#include <cmath>

namespace aniso::synth {

double cardinal_bspline(int order, double t) {
  if (order < 1) throw std::invalid_argument("cardinal_bspline: order must be >= 1");
  if (t < 0.0 || t > order) return 0.0;
  if (order == 1) return (t >= 0.0 && t < 1.0) ? 1.0 : 0.0;
  // Cox-de Boor on the knots 0, 1, ..., order.
  std::vector<double> b(order, 0.0);
  const int cell = std::min(static_cast<int>(std::floor(t)), order - 1);
  b[cell] = 1.0;
  for (int m = 2; m <= order; ++m)
    for (int j = 0; j + m <= order; ++j)
      b[j] = (t - j) / (m - 1.0) * b[j] + (j + m - t) / (m - 1.0) * b[j + 1];
  return b[0];
}

namespace {

double default_alpha(const Factor& f) {
  switch (f.kind) {
    case FactorKind::kink: return 1.0;
    case FactorKind::bspline: return f.order - 1.0;
    case FactorKind::smooth_sine: return 2.0;
  }
  throw std::invalid_argument("Target: unknown factor kind");
}

void validate_factor(const Factor& f) {
  switch (f.kind) {
    case FactorKind::kink:
      if (!(f.center >= 0.0 && f.center <= 1.0))
        throw std::invalid_argument("Target: kink center must lie in [0, 1]");
      return;
    case FactorKind::bspline:
      if (f.order < 1) throw std::invalid_argument("Target: bspline order must be >= 1");
      return;
    case FactorKind::smooth_sine:
      if (!(f.frequency > 0.0))
        throw std::invalid_argument("Target: sine frequency must be positive");
      return;
  }
  throw std::invalid_argument("Target: unknown factor kind");
}

}  // namespace

Target::Target(TargetSpec spec) : spec_(std::move(spec)) {
  const int d = static_cast<int>(spec_.factors.size());
  if (d < 1) throw std::invalid_argument("Target: need at least one factor");
  if (!std::isfinite(spec_.amplitude))
    throw std::invalid_argument("Target: amplitude must be finite");
  for (const Factor& f : spec_.factors) validate_factor(f);

  if (spec_.active_dims.empty()) {
    active_.resize(d);
    for (int i = 0; i < d; ++i) active_[i] = i;
  } else {
    active_ = spec_.active_dims;
    std::sort(active_.begin(), active_.end());
    if (std::unique(active_.begin(), active_.end()) != active_.end())
      throw std::invalid_argument("Target: duplicate active dimension");
    for (int i : active_)
      if (i < 0 || i >= d) throw std::invalid_argument("Target: active dimension out of range");
  }

  if (spec_.declared_alpha.empty()) {
    declared_alpha_.resize(d);
    for (int i = 0; i < d; ++i) declared_alpha_[i] = default_alpha(spec_.factors[i]);
  } else {
    if (static_cast<int>(spec_.declared_alpha.size()) != d)
      throw std::invalid_argument("Target: declared_alpha size mismatch");
    declared_alpha_ = spec_.declared_alpha;
    for (int i : active_) {
      const Factor& f = spec_.factors[i];
      if (f.kind != FactorKind::smooth_sine &&
          std::abs(declared_alpha_[i] - default_alpha(f)) > 1e-12)
        throw std::invalid_argument(
            "Target: declared smoothness inconsistent with the factor kind");
    }
  }
  for (int i = 0; i < d; ++i) {
    if (!(declared_alpha_[i] > 0.0))
      throw std::invalid_argument("Target: declared smoothness must be positive");
    if (declared_alpha_[i] < 1.0)
      warnings_.push_back("declared smoothness below 1 in dimension " +
                          std::to_string(i + 1) + "; outside the rate theory");
  }

  // sup |f*| over a ~1e5-point grid on the active dimensions.
  const int k = static_cast<int>(active_.size());
  const int per_dim = std::max(2, static_cast<int>(std::round(std::pow(1e5, 1.0 / k))));
  std::vector<int> idx(k, 0);
  Vector x = Vector::Constant(d, 0.5);
  double sup = 0.0;
  while (true) {
    for (int j = 0; j < k; ++j) x[active_[j]] = idx[j] / (per_dim - 1.0);
    sup = std::max(sup, std::abs((*this)(x)));
    int j = k - 1;
    while (j >= 0 && ++idx[j] == per_dim) idx[j--] = 0;
    if (j < 0) break;
  }
  sup_estimate_ = sup;
}

double Target::factor_value(int dim_index, double x) const {
  const Factor& f = spec_.factors[dim_index];
  switch (f.kind) {
    case FactorKind::smooth_sine: return std::sin(2.0 * M_PI * f.frequency * x);
    case FactorKind::kink: return std::abs(x - f.center);
    case FactorKind::bspline: {
      const double peak = cardinal_bspline(f.order, 0.5 * f.order);
      return cardinal_bspline(f.order, f.order * x) / peak;
    }
  }
  throw std::invalid_argument("Target: unknown factor kind");
}

double Target::operator()(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("Target: dimension mismatch");
  double value = spec_.combine == Combine::product ? 1.0 : 0.0;
  for (int i : active_) {
    const double v = factor_value(i, x[i]);
    if (spec_.combine == Combine::product)
      value *= v;
    else
      value += v;
  }
  return spec_.amplitude * value;
}

Dataset sample_dataset(const Target& target, const SamplingSpec& spec, double clip_bound) {
  if (spec.n < 1) throw std::invalid_argument("sample_dataset: need n >= 1");
  if (!(clip_bound > 0.0))
    throw std::invalid_argument("sample_dataset: clip bound must be positive");
  if (!(spec.noise_sd >= 0.0))
    throw std::invalid_argument("sample_dataset: noise sd must be >= 0");
  if (target.sup_estimate() > clip_bound)
    throw std::invalid_argument("sample_dataset: sup |f*| exceeds the clip bound");

  const int d = target.dim();
  const rng::Counter input_draws(spec.seed, 0);
  const rng::Counter noise_draws(spec.seed, 1);

  Matrix inputs(spec.n, d);
  Vector responses(spec.n);
  Vector point(d);
  for (long i = 0; i < spec.n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double u = input_draws.uniform(static_cast<std::uint64_t>(i) * d + j);
      inputs(i, j) = u;
      point[j] = u;
    }
    const double f = target(point);
    double eps = 0.0;
    if (spec.noise_sd > 0.0) {
      // Truncate to keep y inside [-M, M] exactly; the windows below always
      // contain a neighborhood of the feasible range since |f| <= M.
      if (spec.noise == NoiseKind::truncated_gaussian) {
        const double lo = std::max(-4.0 * spec.noise_sd, -clip_bound - f);
        const double hi = std::min(4.0 * spec.noise_sd, clip_bound - f);
        eps = noise_draws.truncated_normal(static_cast<std::uint64_t>(i), spec.noise_sd,
                                           lo, hi);
      } else {
        const double half = std::sqrt(3.0) * spec.noise_sd;
        const double lo = std::max(-half, -clip_bound - f);
        const double hi = std::min(half, clip_bound - f);
        eps = lo + noise_draws.uniform(static_cast<std::uint64_t>(i)) * (hi - lo);
      }
    }
    double y = f + eps;
    if (std::abs(y) > clip_bound) {
      if (std::abs(y) > clip_bound * (1.0 + 1e-9))
        throw internal_error("sample_dataset: response escaped [-M, M]");
      y = std::clamp(y, -clip_bound, clip_bound);  // rounding guard
    }
    responses[i] = y;
  }
  return make_dataset(std::move(inputs), std::move(responses), clip_bound);
}

namespace {

// Neumaier compensated accumulator; fixed accumulation order.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

RiskEstimate finalize(const CompensatedSum& s1, const CompensatedSum& s2, long m) {
  const double mean = s1.value() / m;
  double se = 0.0;
  if (m > 1) {
    const double var = std::max(0.0, (s2.value() - m * mean * mean) / (m - 1.0));
    se = std::sqrt(var / m);
  }
  return RiskEstimate{mean, se};
}

}  // namespace

ExcessRisk excess_risk(const solver::TrainedModel& model, const Target& target,
                       long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("excess_risk: need >= 1 sample");
  const int d = target.dim();
  if (model.expansion.dim() != d)
    throw std::invalid_argument("excess_risk: dimension mismatch");

  const rng::Counter draws(seed, 2);
  constexpr long kBlock = 8192;
  CompensatedSum c1, c2, r1, r2;
  Matrix block(std::min(samples, kBlock), d);
  Vector truth(std::min(samples, kBlock));
  Vector point(d);
  for (long start = 0; start < samples; start += kBlock) {
    const long count = std::min(kBlock, samples - start);
    for (long i = 0; i < count; ++i) {
      const std::uint64_t k = static_cast<std::uint64_t>(start + i);
      for (int j = 0; j < d; ++j) {
        const double u = draws.uniform(k * d + j);
        block(i, j) = u;
        point[j] = u;
      }
      truth[i] = target(point);
    }
    const Vector pred = solver::predict_many(model, block.topRows(count));
    for (long i = 0; i < count; ++i) {
      const double raw_err = pred[i] - truth[i];
      const double clip_err = solver::clip(pred[i], model.clip_bound) - truth[i];
      c1.add(clip_err * clip_err);
      c2.add(clip_err * clip_err * clip_err * clip_err);
      r1.add(raw_err * raw_err);
      r2.add(raw_err * raw_err * raw_err * raw_err);
    }
  }
  return ExcessRisk{finalize(c1, c2, samples), finalize(r1, r2, samples)};
}

}  // namespace aniso::synth
