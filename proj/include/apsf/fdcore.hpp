#pragma once

// Functions on a common uniform grid over [0,1], the square-root slope
// transform and the warping group acting on it.

#include <apsf/error.hpp>

#include <Eigen/Dense>

#include <memory>

namespace apsf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Site = Eigen::Vector2d;

/// Uniform grid of T points on [0,1]. Copies share the node array.
class Grid {
 public:
  explicit Grid(Eigen::Index size = 101);

  Eigen::Index size() const noexcept { return points_->size(); }
  double spacing() const noexcept { return 1.0 / static_cast<double>(size() - 1); }
  const Vector& points() const noexcept { return *points_; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.size() == b.size(); }

 private:
  std::shared_ptr<const Vector> points_;
};

/// L2 inner product and norm by the trapezoidal rule.
double inner(const Grid& grid, const Vector& a, const Vector& b);
double norm(const Grid& grid, const Vector& a);

class SampledFunction {
 public:
  SampledFunction(Grid grid, Vector values, Site site = Site::Zero());

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  const Site& site() const noexcept { return site_; }
  double operator()(double t) const;

 private:
  Grid grid_;
  Vector values_;
  Site site_;
};

/// q = sign(f')sqrt|f'| together with f(0), which the transform discards.
class SrsfFunction {
 public:
  SrsfFunction(Grid grid, Vector values, double start = 0.0, Site site = Site::Zero());

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  double start() const noexcept { return start_; }
  const Site& site() const noexcept { return site_; }
  double norm() const { return apsf::norm(grid_, values_); }

 private:
  Grid grid_;
  Vector values_;
  double start_;
  Site site_;
};

/// Boundary-preserving, strictly increasing map of [0,1]. The constructor
/// enforces gamma(0)=0, gamma(1)=1 and positive forward differences.
class WarpingFunction {
 public:
  WarpingFunction(Grid grid, Vector values);
  static WarpingFunction identity(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }

 private:
  Grid grid_;
  Vector values_;
};

/// sqrt of a warp's derivative; a point on the positive orthant of the unit sphere.
class PsiFunction {
 public:
  PsiFunction(Grid grid, Vector values);
  static PsiFunction identity(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }

 private:
  Grid grid_;
  Vector values_;
};

SrsfFunction srsf_transform(const SampledFunction& f);
SampledFunction srsf_inverse(const SrsfFunction& q);

/// (q o gamma) sqrt(gamma').
SrsfFunction group_action(const SrsfFunction& q, const WarpingFunction& g);

/// t -> g1(g2(t)).
WarpingFunction warp_compose(const WarpingFunction& g1, const WarpingFunction& g2);
WarpingFunction warp_invert(const WarpingFunction& g);
PsiFunction warp_to_psi(const WarpingFunction& g);
WarpingFunction psi_to_warp(const PsiFunction& p);

/// f o gamma, evaluated by linear interpolation of f.
SampledFunction compose(const SampledFunction& f, const WarpingFunction& g);

/// Pointwise derivative of a sampled function on its grid.
Vector derivative(const SampledFunction& f);

}  // namespace apsf
