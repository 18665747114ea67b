#include "core/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>

namespace aniso::quad {

namespace {

GaussHermiteRule build_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Jacobi matrix of the (physicists') Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k/2).
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  if (eig.info() != Eigen::Success)
    throw numerical_error("gauss_hermite: eigen decomposition failed");
  GaussHermiteRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights.resize(n);
  const double total = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    const double v = eig.eigenvectors()(0, i);
    rule.weights[i] = total * v * v;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

}  // namespace aniso::quad
