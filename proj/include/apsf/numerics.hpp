#pragma once

// Quadrature, differencing and interpolation on a uniform grid over [0,1].
// Everything here works on Eigen expressions; the grid is described only by
// its spacing h, with node m at m*h.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace apsf::numerics {

template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar h) {
  const Eigen::Index n = v.size();
  if (n < 2) return typename Derived::Scalar(0);
  return h * (v.sum() - typename Derived::Scalar(0.5) * (v(0) + v(n - 1)));
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> cumulative_trapezoid(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
  if (n == 0) return out;
  out(0) = Scalar(0);
  for (Eigen::Index m = 1; m < n; ++m) out(m) = out(m - 1) + Scalar(0.5) * h * (v(m - 1) + v(m));
  return out;
}

/// Central differences at interior nodes, first-order one-sided at the ends.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> gradient(const Eigen::MatrixBase<Derived>& v,
                                                                   typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n);
  if (n < 2) {
    d.setZero();
    return d;
  }
  d(0) = (v(1) - v(0)) / h;
  d(n - 1) = (v(n - 1) - v(n - 2)) / h;
  for (Eigen::Index m = 1; m + 1 < n; ++m) d(m) = (v(m + 1) - v(m - 1)) / (Scalar(2) * h);
  return d;
}

/// Linear interpolation of grid values at t, clamped to [0,1].
template <typename Derived>
typename Derived::Scalar interpolate(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar h,
                                     typename Derived::Scalar t) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  const Scalar x = std::clamp(t / h, Scalar(0), Scalar(n - 1));
  Eigen::Index lo = static_cast<Eigen::Index>(std::floor(x));
  if (lo >= n - 1) lo = n - 2;
  const Scalar frac = x - Scalar(lo);
  if (frac == Scalar(0)) return v(lo);
  return v(lo) + frac * (v(lo + 1) - v(lo));
}

/// Resample values given at uniform nodes on [0,1] onto `target` nodes.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> resample(const Eigen::MatrixBase<Derived>& v,
                                                                   Eigen::Index target) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(target);
  if (v.size() == target) {
    out = v;
    return out;
  }
  const Scalar h_src = Scalar(1) / Scalar(v.size() - 1);
  for (Eigen::Index m = 0; m < target; ++m) {
    out(m) = interpolate(v, h_src, Scalar(m) / Scalar(target - 1));
  }
  return out;
}

}  // namespace apsf::numerics
