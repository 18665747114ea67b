#ifndef ANISO_CORE_TYPES_HPP
#define ANISO_CORE_TYPES_HPP

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A computation produced non-finite values or a factorization failed.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A regression had no usable points (e.g. a modulus that is identically zero).
class degenerate_fit_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An invariant that should hold by construction was violated.
class internal_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Per-dimension kernel widths, all strictly positive.
class Bandwidths {
public:
  explicit Bandwidths(Vector gamma) : gamma_(std::move(gamma)) {
    if (gamma_.size() < 1)
      throw std::invalid_argument("Bandwidths: need at least one dimension");
    for (Eigen::Index i = 0; i < gamma_.size(); ++i)
      if (!(gamma_[i] > 0.0) || !std::isfinite(gamma_[i]))
        throw std::invalid_argument("Bandwidths: widths must be positive and finite");
  }

  static Bandwidths constant(int d, double gamma) {
    return Bandwidths(Vector::Constant(d, gamma));
  }

  int dim() const { return static_cast<int>(gamma_.size()); }
  double operator[](int i) const { return gamma_[i]; }
  const Vector& values() const { return gamma_; }

  double product() const { return gamma_.prod(); }

private:
  Vector gamma_;
};

/// Multi-index (n_1, ..., n_d), all entries >= 0.
struct MultiIndex {
  std::vector<int> n;

  explicit MultiIndex(std::vector<int> idx) : n(std::move(idx)) {
    for (int v : n)
      if (v < 0) throw std::invalid_argument("MultiIndex: entries must be >= 0");
  }

  int dim() const { return static_cast<int>(n.size()); }
};

/// Finite kernel expansion sum_j coefficients[j] * k(., centers.row(j)).
struct KernelExpansion {
  Matrix centers;        // one center per row
  Vector coefficients;   // one per center
  Bandwidths bandwidths;

  KernelExpansion(Matrix centers_, Vector coefficients_, Bandwidths bandwidths_)
      : centers(std::move(centers_)),
        coefficients(std::move(coefficients_)),
        bandwidths(std::move(bandwidths_)) {
    if (centers.rows() != coefficients.size())
      throw std::invalid_argument("KernelExpansion: centers and coefficients must match");
    if (centers.cols() != bandwidths.dim())
      throw std::invalid_argument("KernelExpansion: dimension mismatch");
  }

  int size() const { return static_cast<int>(centers.rows()); }
  int dim() const { return bandwidths.dim(); }
};

/// Axis-aligned box, possibly unbounded.
struct Box {
  Vector lo;
  Vector hi;

  Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.size() < 1)
      throw std::invalid_argument("Box: inconsistent bounds");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: lo must be < hi");
  }

  static Box unit(int d) {
    return Box(Vector::Zero(d), Vector::Ones(d));
  }
  static Box unbounded(int d) {
    const double inf = std::numeric_limits<double>::infinity();
    return Box(Vector::Constant(d, -inf), Vector::Constant(d, inf));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vector& x) const {
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

/// Regression sample: inputs (one point per row), responses bounded by the clip bound.
struct Dataset {
  Matrix inputs;
  Vector responses;
  double clip_bound;
};

/// Validates the Dataset invariants (n >= 1, |y_i| <= M).
inline Dataset make_dataset(Matrix inputs, Vector responses, double clip_bound) {
  if (inputs.rows() < 1)
    throw std::invalid_argument("Dataset: need at least one observation");
  if (inputs.rows() != responses.size())
    throw std::invalid_argument("Dataset: inputs and responses must match");
  if (!(clip_bound > 0.0))
    throw std::invalid_argument("Dataset: clip bound must be positive");
  for (Eigen::Index i = 0; i < responses.size(); ++i)
    if (!(std::abs(responses[i]) <= clip_bound))
      throw std::invalid_argument("Dataset: responses must lie in [-M, M]");
  return Dataset{std::move(inputs), std::move(responses), clip_bound};
}

/// Per-dimension smoothness declaration, optionally restricted to an active subset.
struct SmoothnessProfile {
  std::vector<double> alpha;                       // one entry per dimension, >= 1 expected
  std::optional<std::vector<int>> active_subset;   // 0-based dimension indices

  int dim() const { return static_cast<int>(alpha.size()); }
};

}  // namespace aniso

#endif
