#ifndef ANISO_CORE_SOLVER_HPP
#define ANISO_CORE_SOLVER_HPP

#include "core/types.hpp"

namespace aniso::solver {

/// Kernel expansion fitted by regularized least squares, plus the clip bound
/// it is evaluated under.
struct TrainedModel {
  KernelExpansion expansion;
  double lambda;
  double clip_bound;
};

/// Solves the regularized least-squares problem over the RKHS: the dual system
/// (K + lambda n I) alpha = y via Cholesky factorization (the ridge term makes
/// the system positive definite). Throws numerical_error if the factorization
/// fails or produces non-finite coefficients.
TrainedModel fit(const Dataset& data, double lambda, const Bandwidths& bw);

/// fit() with the kernel matrix supplied by the caller, for sweeps that share
/// one Gram matrix across several lambda values. gram must equal
/// kernel::gram(data.inputs, bw).
TrainedModel fit_with_gram(const Matrix& gram, const Dataset& data, double lambda,
                           const Bandwidths& bw);

/// Unclipped kernel-expansion value sum_j alpha_j k(x, c_j).
double predict(const TrainedModel& model, const Vector& x);

/// predict() applied to each row of x.
Vector predict_many(const TrainedModel& model, const Matrix& x);

/// Truncation of t into [-bound, bound].
double clip(double t, double bound);

/// Mean squared error of the (optionally clipped) predictor on the sample.
double empirical_risk(const TrainedModel& model, const Dataset& data, bool clipped);

/// Regularized objective: raw empirical risk + lambda * ||f||_H^2.
double objective(const TrainedModel& model, const Dataset& data);

}  // namespace aniso::solver

#endif
