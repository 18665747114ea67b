#ifndef ANISO_CORE_SYNTH_HPP
#define ANISO_CORE_SYNTH_HPP

#include "core/solver.hpp"
#include "core/types.hpp"

#include <cstdint>
#include <string>

namespace aniso::synth {

enum class FactorKind { smooth_sine, kink, bspline };

/// One univariate factor of a synthetic target on [0, 1].
struct Factor {
  FactorKind kind = FactorKind::smooth_sine;
  double frequency = 1.0;  // smooth_sine: sin(2 pi frequency x)
  double center = 0.5;     // kink: |x - center|
  int order = 3;           // bspline: cardinal B-spline of this order, peak-normalized
};

enum class Combine { product, sum };

struct TargetSpec {
  std::vector<Factor> factors;        // one per dimension
  Combine combine = Combine::product;
  std::vector<int> active_dims;       // 0-based; empty means all dimensions
  double amplitude = 1.0;
  std::vector<double> declared_alpha; // empty means per-kind defaults
};

/// Cardinal B-spline of the given order evaluated at t in [0, order].
double cardinal_bspline(int order, double t);

/// Deterministic synthetic regression target on [0, 1]^d with a declared
/// per-dimension smoothness. Inactive dimensions do not influence the value.
class Target {
public:
  explicit Target(TargetSpec spec);

  double operator()(const Vector& x) const;

  int dim() const { return static_cast<int>(spec_.factors.size()); }
  const std::vector<double>& declared_alpha() const { return declared_alpha_; }
  const std::vector<int>& active_dims() const { return active_; }
  const TargetSpec& spec() const { return spec_; }

  /// Grid estimate (~1e5 points over the active dimensions) of sup |f*|.
  double sup_estimate() const { return sup_estimate_; }

  /// Default clip bound 1.5 * sup estimate.
  double default_clip_bound() const { return 1.5 * sup_estimate_; }

  /// Non-fatal spec oddities (e.g. declared smoothness below 1, which the
  /// rate theory does not cover).
  const std::vector<std::string>& warnings() const { return warnings_; }

private:
  double factor_value(int dim_index, double x) const;

  TargetSpec spec_;
  std::vector<int> active_;
  std::vector<double> declared_alpha_;
  std::vector<std::string> warnings_;
  double sup_estimate_ = 0.0;
};

enum class NoiseKind { truncated_gaussian, uniform };

struct SamplingSpec {
  long n = 0;
  double noise_sd = 0.0;
  NoiseKind noise = NoiseKind::truncated_gaussian;
  std::uint64_t seed = 0;
};

/// Draws n inputs uniformly on [0, 1]^d with a counter-based generator and adds
/// noise truncated so that every response stays inside [-M, M]. Bitwise
/// reproducible for a given seed regardless of call partitioning.
Dataset sample_dataset(const Target& target, const SamplingSpec& spec, double clip_bound);

struct RiskEstimate {
  double value;
  double std_error;
};

/// Monte-Carlo excess risk ||f - f*||^2_{L2(uniform)} for the clipped and the
/// raw predictor, estimated on common random points (so clipped <= raw holds
/// sample by sample whenever sup |f*| <= M). Fixed-order compensated summation
/// keeps the estimate independent of any worker partitioning.
struct ExcessRisk {
  RiskEstimate clipped;
  RiskEstimate raw;
};

ExcessRisk excess_risk(const solver::TrainedModel& model, const Target& target,
                       long samples, std::uint64_t seed);

}  // namespace aniso::synth

#endif
