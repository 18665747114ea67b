#include "core/synth.hpp"

#include "core/besov.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace aniso;
using synth::Combine;
using synth::Factor;
using synth::FactorKind;
using synth::Target;
using synth::TargetSpec;

namespace {

TargetSpec kink_times_bspline() {
  TargetSpec spec;
  spec.factors = {Factor{FactorKind::kink, 1.0, 0.5, 3},
                  Factor{FactorKind::bspline, 1.0, 0.5, 3}};
  return spec;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("counter generator: quantile accuracy and stream independence") {
  // Round-trip against the CDF at textbook values.
  CHECK(rng::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rng::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(rng::normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-9));
  for (double x : {-3.0, -0.7, 0.0, 1.2, 4.0})
    CHECK(rng::normal_quantile(rng::normal_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  CHECK_THROWS_AS(rng::normal_quantile(0.0), std::invalid_argument);

  // Draw k is a pure function of (seed, stream, k).
  const rng::Counter a(7, 1), b(7, 1), c(7, 2);
  CHECK(a.uniform(123) == b.uniform(123));
  CHECK(a.uniform(123) != c.uniform(123));
  CHECK(a.uniform(0) >= 0.0);
  CHECK(a.uniform(0) < 1.0);
}

TEST_CASE("cardinal B-splines") {
  CHECK(synth::cardinal_bspline(1, 0.5) == 1.0);
  CHECK(synth::cardinal_bspline(1, 1.5) == 0.0);
  // Order 2 is the hat function peaking at 1.
  CHECK(synth::cardinal_bspline(2, 1.0) == doctest::Approx(1.0));
  CHECK(synth::cardinal_bspline(2, 0.5) == doctest::Approx(0.5));
  // Order 3 is C^1 with max 0.75 at the midpoint.
  CHECK(synth::cardinal_bspline(3, 1.5) == doctest::Approx(0.75));
  CHECK(synth::cardinal_bspline(3, 0.0) == 0.0);
  CHECK(synth::cardinal_bspline(3, 3.0) == 0.0);

  // Unit mass (trapezoid oracle; order 1 is a discontinuous indicator, so the
  // continuous orders carry the tight tolerance).
  for (int order = 1; order <= 5; ++order) {
    const int steps = 20000;
    double mass = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double t = order * static_cast<double>(i) / steps;
      const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
      mass += w * synth::cardinal_bspline(order, t);
    }
    mass *= static_cast<double>(order) / steps;
    CHECK(mass == doctest::Approx(1.0).epsilon(order == 1 ? 1e-4 : 1e-6));
  }
}

TEST_CASE("target construction and evaluation") {
  const Target target(kink_times_bspline());
  CHECK(target.dim() == 2);
  CHECK(target.declared_alpha() == std::vector<double>{1.0, 2.0});
  // Kink vertex zeroes the product.
  CHECK(target(vec2(0.5, 0.3)) == 0.0);
  // The B-spline factor is peak-normalized.
  CHECK(target(vec2(0.0, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(target.warnings().empty());
  CHECK(target.sup_estimate() == doctest::Approx(0.5).epsilon(1e-3));

  TargetSpec sines;
  sines.factors = {Factor{FactorKind::smooth_sine, 1.0, 0.5, 3},
                   Factor{FactorKind::smooth_sine, 1.0, 0.5, 3}};
  const Target product_sines(sines);
  CHECK(product_sines(vec2(0.25, 0.25)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inactive dimensions do not influence the target") {
  TargetSpec spec;
  spec.factors = {Factor{FactorKind::kink, 1.0, 0.5, 3},
                  Factor{FactorKind::kink, 1.0, 0.25, 3}};
  spec.active_dims = {0};
  const Target target(spec);
  CHECK(target(vec2(0.2, 0.1)) == target(vec2(0.2, 0.9)));
  CHECK(target(vec2(0.2, 0.1)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("target specs are validated") {
  TargetSpec bad = kink_times_bspline();
  bad.declared_alpha = {2.0, 2.0};  // kink must be declared alpha = 1
  CHECK_THROWS_AS(Target{bad}, std::invalid_argument);

  TargetSpec off_center = kink_times_bspline();
  off_center.factors[0].center = 1.5;
  CHECK_THROWS_AS(Target{off_center}, std::invalid_argument);

  TargetSpec dup = kink_times_bspline();
  dup.active_dims = {0, 0};
  CHECK_THROWS_AS(Target{dup}, std::invalid_argument);

  // Sub-Lipschitz declarations warn instead of failing.
  TargetSpec rough;
  rough.factors = {Factor{FactorKind::smooth_sine, 1.0, 0.5, 3}};
  rough.declared_alpha = {0.5};
  const Target warned(rough);
  CHECK_FALSE(warned.warnings().empty());
}

TEST_CASE("sampling is exact in the noiseless case and reproducible") {
  const Target target(kink_times_bspline());
  synth::SamplingSpec spec;
  spec.n = 64;
  spec.seed = 99;
  const Dataset a = synth::sample_dataset(target, spec, 1.0);
  const Dataset b = synth::sample_dataset(target, spec, 1.0);
  CHECK(a.inputs == b.inputs);  // bitwise determinism
  CHECK(a.responses == b.responses);
  for (long i = 0; i < spec.n; ++i) {
    CHECK(a.responses[i] == target(a.inputs.row(i).transpose()));
    CHECK(a.inputs.row(i).minCoeff() >= 0.0);
    CHECK(a.inputs.row(i).maxCoeff() <= 1.0);
  }
}

TEST_CASE("truncated noise keeps the declared standard deviation and the bound") {
  const Target target(kink_times_bspline());
  synth::SamplingSpec spec;
  spec.n = 10000;
  spec.noise_sd = 0.1;
  spec.seed = 7;
  for (const synth::NoiseKind kind :
       {synth::NoiseKind::truncated_gaussian, synth::NoiseKind::uniform}) {
    spec.noise = kind;
    const Dataset data = synth::sample_dataset(target, spec, 1.0);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < spec.n; ++i) {
      const double eps = data.responses[i] - target(data.inputs.row(i).transpose());
      sum += eps;
      sumsq += eps * eps;
      CHECK(std::abs(data.responses[i]) <= 1.0);
    }
    const double mean = sum / spec.n;
    const double sd = std::sqrt(sumsq / spec.n - mean * mean);
    CHECK(sd == doctest::Approx(0.1).epsilon(0.1));
  }
}

TEST_CASE("sampling validates the clip bound") {
  TargetSpec spec;
  spec.factors = {Factor{FactorKind::smooth_sine, 1.0, 0.5, 3}};
  spec.amplitude = 2.0;
  const Target target(spec);
  synth::SamplingSpec samp;
  samp.n = 8;
  CHECK_THROWS_AS(synth::sample_dataset(target, samp, 1.0), std::invalid_argument);
  CHECK(target.default_clip_bound() == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("excess risk of the zero model is the L2 mass of the target") {
  TargetSpec spec;
  spec.factors = {Factor{FactorKind::smooth_sine, 1.0, 0.5, 3}};
  const Target target(spec);
  Matrix center(1, 1);
  center << 0.5;
  const solver::TrainedModel zero{
      KernelExpansion(center, Vector::Zero(1), Bandwidths::constant(1, 0.5)), 0.1, 1.0};
  const synth::ExcessRisk risk = synth::excess_risk(zero, target, 100000, 321);
  // int_0^1 sin^2(2 pi x) dx = 1/2.
  CHECK(std::abs(risk.clipped.value - 0.5) <= 3.0 * risk.clipped.std_error);
  CHECK(risk.clipped.std_error > 0.0);
  CHECK(risk.clipped.value == risk.raw.value);  // nothing to clip for the zero model
}

TEST_CASE("a dense noiseless fit drives the excess risk to zero") {
  TargetSpec spec;
  spec.factors = {Factor{FactorKind::smooth_sine, 1.0, 0.5, 3}};
  const Target target(spec);
  synth::SamplingSpec samp;
  samp.n = 200;
  samp.seed = 5;
  const Dataset data = synth::sample_dataset(target, samp, 1.5);
  const auto model = solver::fit(data, 1e-9, Bandwidths::constant(1, 0.2));
  const synth::ExcessRisk risk = synth::excess_risk(model, target, 20000, 11);
  CHECK(risk.clipped.value <= 1e-4);
}

TEST_CASE("clipped risk never exceeds raw risk on common random points") {
  const Target target(kink_times_bspline());
  synth::SamplingSpec samp;
  samp.n = 40;
  samp.noise_sd = 0.2;
  samp.seed = 13;
  const Dataset data = synth::sample_dataset(target, samp, 1.0);
  // An overfit low-bandwidth model produces wild raw predictions worth clipping.
  const auto model = solver::fit(data, 1e-8, Bandwidths::constant(2, 0.05));
  const synth::ExcessRisk risk = synth::excess_risk(model, target, 5000, 17);
  CHECK(risk.clipped.value <= risk.raw.value + 1e-15);
  // Identical seeds reproduce the estimate bit for bit.
  const synth::ExcessRisk again = synth::excess_risk(model, target, 5000, 17);
  CHECK(risk.clipped.value == again.clipped.value);
  CHECK(risk.clipped.std_error == again.clipped.std_error);
}

TEST_CASE("declared smoothness is recoverable from samples of the factors") {
  // Light calibration check (the acceptance suite runs the full version).
  const Target target(kink_times_bspline());
  const auto f = [&target](const Vector& x) { return target(x); };
  std::vector<double> grid;
  for (int k = 0; k < 5; ++k) grid.push_back(0.2 / std::pow(2.0, k));
  const Box box = Box::unit(2);
  const double a1 = besov::estimate_smoothness_exponent(f, 0, grid, 2, box);
  CHECK(std::abs(a1 - 1.0) <= 0.2);
}
