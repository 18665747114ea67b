#include "core/solver.hpp"

#include "core/kernel.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace aniso::solver {

namespace {

TrainedModel solve_dual(Matrix system, const Dataset& data, double lambda,
                        const Bandwidths& bw) {
  const Eigen::Index n = data.inputs.rows();
  system.diagonal().array() += lambda * static_cast<double>(n);
  Eigen::LLT<Matrix> llt(std::move(system));
  if (llt.info() != Eigen::Success)
    throw numerical_error("solver::fit: Cholesky factorization failed");
  Vector alpha = llt.solve(data.responses);
  if (!alpha.allFinite())
    throw numerical_error("solver::fit: non-finite dual coefficients");
  return TrainedModel{KernelExpansion(data.inputs, std::move(alpha), bw), lambda,
                      data.clip_bound};
}

void validate_fit_args(const Dataset& data, double lambda, const Bandwidths& bw) {
  if (data.inputs.rows() < 1) throw std::invalid_argument("solver::fit: empty dataset");
  if (!(lambda > 0.0)) throw std::invalid_argument("solver::fit: lambda must be positive");
  if (data.inputs.cols() != bw.dim())
    throw std::invalid_argument("solver::fit: dimension mismatch");
  if (!(data.clip_bound > 0.0))
    throw std::invalid_argument("solver::fit: clip bound must be positive");
}

}  // namespace

TrainedModel fit(const Dataset& data, double lambda, const Bandwidths& bw) {
  validate_fit_args(data, lambda, bw);
  return solve_dual(kernel::gram(data.inputs, bw), data, lambda, bw);
}

TrainedModel fit_with_gram(const Matrix& gram, const Dataset& data, double lambda,
                           const Bandwidths& bw) {
  validate_fit_args(data, lambda, bw);
  if (gram.rows() != data.inputs.rows() || gram.cols() != data.inputs.rows())
    throw std::invalid_argument("solver::fit_with_gram: gram size mismatch");
  return solve_dual(gram, data, lambda, bw);
}

double predict(const TrainedModel& model, const Vector& x) {
  if (x.size() != model.expansion.dim())
    throw std::invalid_argument("solver::predict: dimension mismatch");
  const Matrix& c = model.expansion.centers;
  const Vector& a = model.expansion.coefficients;
  const Bandwidths& bw = model.expansion.bandwidths;
  double value = 0.0;
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    value += a[j] * kernel::eval(x, c.row(j).transpose(), bw);
  return value;
}

Vector predict_many(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.expansion.dim())
    throw std::invalid_argument("solver::predict_many: dimension mismatch");
  const Matrix& centers = model.expansion.centers;
  const Vector& a = model.expansion.coefficients;
  const Bandwidths& bw = model.expansion.bandwidths;
  const int d = bw.dim();

  std::vector<double> inv(d);
  for (int k = 0; k < d; ++k) inv[k] = 1.0 / (bw[k] * bw[k]);

  // Row-at-a-time with a vectorized exponential over the centers.
  Vector out(x.rows());
  Vector dist(centers.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = x(i, k) - centers(j, k);
        s += t * t * inv[k];
      }
      dist[j] = -s;
    }
    out[i] = dist.array().exp().matrix().dot(a);
  }
  return out;
}

double clip(double t, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("solver::clip: bound must be positive");
  if (t < -bound) return -bound;
  if (t > bound) return bound;
  return t;
}

double empirical_risk(const TrainedModel& model, const Dataset& data, bool clipped) {
  const Vector pred = predict_many(model, data.inputs);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double f = clipped ? clip(pred[i], model.clip_bound) : pred[i];
    const double e = data.responses[i] - f;
    sum += e * e;
  }
  return sum / static_cast<double>(pred.size());
}

double objective(const TrainedModel& model, const Dataset& data) {
  const double norm = kernel::rkhs_norm(model.expansion);
  return empirical_risk(model, data, /*clipped=*/false) + model.lambda * norm * norm;
}

}  // namespace aniso::solver
