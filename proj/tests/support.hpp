#pragma once

// Shared fixtures for the unit tests: smooth test functions and warps with
// closed forms, so oracles can be evaluated independently of the library.

#include <apsf/fdcore.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace apsf::test {

inline constexpr double kPi = 3.14159265358979323846;

inline Vector sample(const Grid& grid, double (*fn)(double)) {
  Vector v(grid.size());
  for (Eigen::Index m = 0; m < v.size(); ++m) v(m) = fn(grid.points()(m));
  return v;
}

template <typename F>
Vector sample(const Grid& grid, F fn) {
  Vector v(grid.size());
  for (Eigen::Index m = 0; m < v.size(); ++m) v(m) = fn(grid.points()(m));
  return v;
}

/// gamma(t) = (exp(a t) - 1) / (exp(a) - 1); a = 0 is the identity.
inline double exp_warp(double a, double t) {
  if (std::abs(a) < 1e-12) return t;
  return std::expm1(a * t) / std::expm1(a);
}

inline WarpingFunction exp_warp(const Grid& grid, double a) {
  Vector v = sample(grid, [a](double t) { return exp_warp(a, t); });
  v(0) = 0.0;
  v(v.size() - 1) = 1.0;
  return WarpingFunction(grid, v);
}

/// Random smooth function: a few low-frequency sines plus a linear trend.
inline Vector random_smooth(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double c0 = n(rng), c1 = n(rng), c2 = n(rng), c3 = n(rng);
  return sample(grid, [&](double t) {
    return c0 * t + c1 * std::sin(2 * kPi * t) + c2 * std::cos(3 * kPi * t) + c3 * std::sin(kPi * t);
  });
}

template <typename A, typename B>
double max_abs(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Independent evaluation of the lattice alignment objective: the warp is
// linear between path nodes, each segment is integrated by the trapezoidal
// rule on the time grid with sqrt(slope) as the segment's derivative factor.
inline double segment_objective(const Vector& q1, const Vector& q2, double h, int i0, int j0, int i1, int j1,
                                double lambda) {
  const double slope = static_cast<double>(j1 - j0) / (i1 - i0);
  double s = 0.0;
  for (int r = 0; r <= i1 - i0; ++r) {
    const double pos = j0 + r * slope;  // warp value in index units
    const int lo = std::min(static_cast<int>(std::floor(pos)), static_cast<int>(q2.size()) - 2);
    const double v = q2(lo) + (pos - lo) * (q2(lo + 1) - q2(lo));
    const double d = q1(i0 + r) - v * std::sqrt(slope);
    s += (r == 0 || r == i1 - i0 ? 0.5 : 1.0) * d * d;
  }
  const double pen = std::sqrt(slope) - 1.0;
  return h * (s + lambda * pen * pen * (i1 - i0));
}

/// Minimum objective over every lattice path built from coprime steps of size <= 6.
inline double exhaustive_minimum(const Vector& q1, const Vector& q2, double h, double lambda,
                                 long long* count = nullptr) {
  std::vector<std::pair<int, int>> steps;
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b)
      if (std::gcd(a, b) == 1) steps.emplace_back(a, b);
  const int last = static_cast<int>(q1.size()) - 1;
  double best = std::numeric_limits<double>::infinity();
  long long paths = 0;
  std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
    if (i == last && j == last) {
      ++paths;
      best = std::min(best, acc);
      return;
    }
    for (const auto& [dt, dg] : steps) {
      if (i + dt > last || j + dg > last) continue;
      walk(i + dt, j + dg, acc + segment_objective(q1, q2, h, i, j, i + dt, j + dg, lambda));
    }
  };
  walk(0, 0, 0.0);
  if (count) *count = paths;
  return best;
}

/// Rand index by direct pair counting.
inline double pair_count_rand(const std::vector<int>& a, const std::vector<int>& b) {
  int agree = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++total;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  return static_cast<double>(agree) / total;
}

}  // namespace apsf::test
