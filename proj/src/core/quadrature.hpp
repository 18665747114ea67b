#ifndef ANISO_CORE_QUADRATURE_HPP
#define ANISO_CORE_QUADRATURE_HPP

#include "core/types.hpp"

namespace aniso::quad {

/// Nodes and weights for int f(t) exp(-t^2) dt on the real line.
struct GaussHermiteRule {
  Vector nodes;
  Vector weights;
};

/// Cached Gauss-Hermite rule with n nodes (Golub-Welsch).
const GaussHermiteRule& gauss_hermite(int n);

/// Iterates all multi-indices in prod_i {0, ..., sizes[i]-1} in lexicographic
/// order, calling fn(idx) for each. Fixed order keeps tensor sums deterministic.
template <typename Fn>
void for_each_multi_index(const std::vector<int>& sizes, Fn&& fn) {
  std::vector<int> idx(sizes.size(), 0);
  if (sizes.empty()) return;
  for (int s : sizes)
    if (s <= 0) return;
  while (true) {
    fn(idx);
    int k = static_cast<int>(sizes.size()) - 1;
    while (k >= 0) {
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

}  // namespace aniso::quad

#endif
