#pragma once

// Seeded generators for spatially correlated functional data: Gaussian and
// correlated-uniform fields with exponential covariance, Beta-CDF warps, and
// the kriging / clustering simulation designs.

#include <apsf/clustering.hpp>
#include <apsf/dataset.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace apsf {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index); replicate i of a study uses derived_stream(seed, i).
Rng derived_stream(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// sigma2 * exp(-h / ell).
double matern_covariance(double h, double sigma2, double ell);

struct FieldSpec {
  std::vector<Site> sites;
  double sigma2 = 1.0;
  double ell = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

Matrix covariance_matrix(const FieldSpec& spec);

/// mean + L z, L the Cholesky factor of the covariance (1e-10 diagonal jitter).
Vector sample_gaussian_field(const FieldSpec& spec, const Vector& mean);
Vector sample_gaussian_field(const FieldSpec& spec, const Vector& mean, Rng& rng);

/// Gaussian copula onto [-B, B]: unit-variance field pushed through the normal CDF.
Vector correlated_uniform(const FieldSpec& spec, double bound);
Vector correlated_uniform(const FieldSpec& spec, double bound, Rng& rng);

/// gamma(t) = 1 - (1 - t)^exp(b), the Beta(1, e^b) distribution function.
WarpingFunction beta_cdf_warp(const Grid& grid, double b);

/// Clamped cubic B-spline basis with equally spaced interior knots; one column per function.
Matrix bspline_basis(const Grid& grid, int count);

struct SimDataset {
  SpatialDataset dataset;
  std::vector<SampledFunction> true_amplitudes;  ///< pre-warp functions, noise included
  std::vector<WarpingFunction> true_phases;
  Partition amplitude_partition;  ///< empty unless the design has clusters
  Partition phase_partition;
};

enum class KrigingDesign { bspline, bimodal };
enum class Layout { grid5x5, uniform_random };

KrigingDesign parse_kriging_design(const std::string& name);

struct KrigingSimSpec {
  KrigingDesign design = KrigingDesign::bimodal;
  double bound = 1.0;  ///< B, half-width of the phase parameter range
  double ell1 = 2.0 * 1.4142135623730951;
  double ell2 = 2.0 * 1.4142135623730951;
  double sigma_a2 = 1.0;
  double noise_sd = 0.5;
  Layout layout = Layout::grid5x5;
  int random_sites = 25;
  Eigen::Index grid_size = 101;
  std::uint64_t seed = 0;
};

/// Bimodal shape on [0,1]: one period of -cos on [-1,1] mapped onto the unit interval.
Vector bimodal_shape(const Grid& grid);

SimDataset gen_kriging_dataset(const KrigingSimSpec& spec);

enum class ClusterDesign { agree, disagree };

ClusterDesign parse_cluster_design(const std::string& name);

struct ClusterSimSpec {
  ClusterDesign design = ClusterDesign::disagree;
  double delta_a = 2.0;
  double delta_b = 0.5;
  double bound = 1.0;
  double sigma_a2 = 1.0;
  double noise_sd = 0.5;
  double ell = 2.0 * 1.4142135623730951;
  Eigen::Index grid_size = 101;
  std::uint64_t seed = 0;
};

SimDataset gen_cluster_dataset(const ClusterSimSpec& spec);

/// Scale-only model: f_i = integral of (c_i mu_q)|c_i mu_q| warped by a random
/// Beta warp, with log c_i a Gaussian field. Sites form an m x m grid on [-2,2]^2.
struct ScaleSimSpec {
  int grid_side = 5;
  double log_scale_sigma2 = 0.25;
  double ell = 2.0 * 1.4142135623730951;
  double bound = 1.0;
  Eigen::Index grid_size = 101;
  std::uint64_t seed = 0;
};

struct ScaleSim {
  SimDataset sim;
  Vector base_srsf;  ///< mu_q
  /// True SRSF at `target`: c(target) mu_q, c drawn jointly with the sites.
  SrsfFunction target_amplitude;
};

ScaleSim gen_scale_dataset(const ScaleSimSpec& spec, const Site& target);

/// Correlated amplitudes, spatially independent phases (B = 0.5 by default) on a
/// 7 x 7 grid over [0,6]^2: the raw trace-variogram sees mostly phase noise while
/// the aligned amplitudes keep their spatial structure. Much larger B gives
/// relative warps steeper than the alignment's slope range can follow.
struct ConfoundingSpec {
  double bound = 0.5;
  double sigma_a2 = 1.0;
  double ell = 3.0;
  Eigen::Index grid_size = 101;
  std::uint64_t seed = 0;
};

SimDataset gen_confounding_dataset(const ConfoundingSpec& spec);

/// Bundled-style synthetic data sets (see README): daily ozone-like seasonal
/// curves with injected phase variation, and temperature-like curves with a
/// latitude trend and latitude/longitude covariates.
SpatialDataset ozone_like_dataset(std::uint64_t seed = 2024, Eigen::Index samples = 365);
SpatialDataset weather_like_dataset(std::uint64_t seed = 2025, Eigen::Index samples = 365);

}  // namespace apsf
