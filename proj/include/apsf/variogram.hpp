#pragma once

// Empirical trace-variograms over spatial or enlarged-domain lags, and
// least-squares fitting of the exponential (Matern nu = 1/2) model.

#include <apsf/fdcore.hpp>

#include <vector>

namespace apsf {

struct VariogramBin {
  double lag;           ///< mean pair distance inside the bin
  double semivariance;  ///< half the mean squared value distance
  int pair_count;
};

struct EmpiricalVariogram {
  std::vector<VariogramBin> bins;
};

struct BinConfig {
  int bins = 12;
  /// Largest lag kept; a non-positive value means half the largest pairwise distance.
  double max_lag = 0.0;
};

/// Pairs (i < j) are grouped into equal-width lag bins by `distances(i,j)`;
/// each retained bin reports half the mean of `sq_value_distances(i,j)`.
EmpiricalVariogram empirical_variogram(const Matrix& distances, const Matrix& sq_value_distances,
                                       const BinConfig& binning = {});

/// Convenience overload: squared L2 distances between sampled value vectors.
EmpiricalVariogram empirical_variogram(const Matrix& distances, const std::vector<Vector>& values, const Grid& grid,
                                       const BinConfig& binning = {});

/// gamma(h) = nugget + scale (1 - exp(-h / range)) for h > 0, nugget at h = 0.
struct VariogramModel {
  double scale = 0.0;
  double range = 1.0;
  double nugget = 0.0;
  double smoothness = 0.5;
  double fit_error = 0.0;  ///< residual sum of squares over the bins
  double r2 = 0.0;
  bool degenerate = false;  ///< set when the semivariances carried no lag structure

  double operator()(double h) const;
  /// Partial sill over total sill, scale / (scale + nugget).
  double signal_fraction() const;
};

struct FitOptions {
  /// Also fit a nugget; the range is then bounded below by the smallest bin lag.
  bool fit_nugget = false;
};

/// Ordinary least squares over (scale, range) with the nugget fixed at zero
/// unless requested. Needs at least three bins.
VariogramModel fit_matern(const EmpiricalVariogram& emp, const FitOptions& options = {});

Matrix site_distance_matrix(const std::vector<Site>& sites);

/// sqrt(|s1 - s2|^2 + omega * d_sh^2).
double enlarged_distance(const Site& s1, const SrsfFunction& shape1, const Site& s2, const SrsfFunction& shape2,
                         double omega);

struct EnlargedPoint {
  Site site;
  SrsfFunction shape;
};

double enlarged_distance(const EnlargedPoint& y1, const EnlargedPoint& y2, double omega);

/// Elementwise enlarged distance from precomputed site and shape distances.
Matrix enlarged_distance_matrix(const Matrix& site_distances, const Matrix& shape_distances, double omega);

/// Pairwise shape distances, symmetrised by averaging both alignment directions.
Matrix shape_distance_matrix(const std::vector<SrsfFunction>& shapes);

/// {0} and 10^k for k = -1..4.
std::vector<double> default_omega_candidates();

struct OmegaCandidate {
  double omega;
  bool fitted;
  VariogramModel model;
};

struct OmegaSelection {
  double omega;
  VariogramModel model;
  std::vector<OmegaCandidate> candidates;
};

/// Picks the enlarged-domain weight whose phase variogram fits best (r2), then
/// falls back to omega = 0 unless that candidate cuts the residual sum of
/// squares by at least 5% against omega = 0.
OmegaSelection select_omega(const Matrix& site_distances, const Matrix& shape_distances,
                            const Matrix& sq_value_distances, const std::vector<double>& candidates,
                            const BinConfig& binning = {});

OmegaSelection select_omega(const std::vector<Site>& sites, const std::vector<SrsfFunction>& shapes,
                            const std::vector<PsiFunction>& psi_values, const std::vector<double>& candidates,
                            const BinConfig& binning = {});

}  // namespace apsf
