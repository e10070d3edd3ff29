#pragma once

#include <stdexcept>

#include "graphext/types.hpp"

namespace graphext {

/// Finite-difference weights for the m-th derivative at x0 from the nodes xs
/// (Fornberg's recursion). With n nodes the rule is exact on polynomials of
/// degree n-1, i.e. of order n-m.
template <typename Scalar = Real>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fd_weights(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& xs,
    Scalar x0, int m) {
  const Index n = xs.size();
  if (m < 0 || n <= m) throw std::invalid_argument("fd_weights: need more nodes than derivative order");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, m + 1);
  c(0, 0) = Scalar(1);
  Scalar c1 = Scalar(1);
  Scalar c4 = xs(0) - x0;
  for (Index i = 1; i < n; ++i) {
    const int mn = static_cast<int>(std::min<Index>(i, m));
    Scalar c2 = Scalar(1);
    const Scalar c5 = c4;
    c4 = xs(i) - x0;
    for (Index j = 0; j < i; ++j) {
      const Scalar c3 = xs(i) - xs(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (Scalar(k) * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - Scalar(k) * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

/// Weights for the m-th derivative at one end of a uniform grid with spacing h.
/// `npts` nodes counted from the boundary; `left_end` selects which end the
/// stencil is anchored at (nodes then run away from resp. toward the boundary).
inline RealVector one_sided_weights(int m, int npts, Real h, bool left_end) {
  RealVector xs(npts);
  for (int i = 0; i < npts; ++i) xs(i) = h * i;
  const Real x0 = left_end ? 0.0 : h * (npts - 1);
  return fd_weights<Real>(xs, x0, m);
}

}  // namespace graphext
