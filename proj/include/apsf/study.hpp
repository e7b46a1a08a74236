#pragma once

// Seeded multi-replicate experiments built from the simulation designs.

#include <apsf/clustering.hpp>
#include <apsf/loocv.hpp>
#include <apsf/simgen.hpp>

#include <vector>

namespace apsf {

struct KrigingStudyOptions {
  KrigingSimSpec sim{};
  KrigingConfig config{};
  /// Smoothing applied to the simulated observations before prediction; the
  /// smoothed curves also serve as the held-out truth.
  double iota = 1e-6;
  int replicates = 10;
  std::uint64_t seed = 1;
};

struct KrigingReplicate {
  std::uint64_t seed = 0;
  ErrorMetrics apk{};
  ErrorMetrics ok{};
  std::size_t failed_apk = 0;
  std::size_t failed_ok = 0;
};

KrigingReplicate kriging_replicate(const KrigingStudyOptions& options, int replicate);
std::vector<KrigingReplicate> kriging_study(const KrigingStudyOptions& options);

struct ClusterStudyOptions {
  ClusterSimSpec sim{};
  int k = 4;
  Linkage linkage = Linkage::average;
  std::vector<double> omega_candidates = default_omega_candidates();
  double iota = 1e-6;
  int replicates = 20;
  std::uint64_t seed = 1;
};

struct ClusterReplicate {
  std::uint64_t seed = 0;
  double amplitude_apc = 0.0;  ///< rand index of amplitude clustering vs true amplitude partition
  double phase_apc = 0.0;      ///< rand index of phase clustering vs true phase partition
  double amplitude_l2 = 0.0;   ///< L2 clustering vs true amplitude partition
  double phase_l2 = 0.0;       ///< L2 clustering vs true phase partition
};

struct ClusterOutcome {
  Partition amplitude;
  Partition phase;
  Partition l2;
  WeightedDissimilarity amplitude_matrix;
  WeightedDissimilarity phase_matrix;
  WeightedDissimilarity l2_matrix;
};

/// Amplitude, phase and L2 partitions of one dataset.
ClusterOutcome cluster_dataset(const SpatialDataset& dataset, int k, Linkage linkage,
                               const std::vector<double>& omega_candidates, bool spatial = true);

ClusterReplicate cluster_replicate(const ClusterStudyOptions& options, int replicate);
std::vector<ClusterReplicate> cluster_study(const ClusterStudyOptions& options);

struct ScaleStudyOptions {
  std::vector<int> grid_sides{3, 5, 7};
  ScaleSimSpec sim{};
  KrigingConfig config{};
  Site target{0.5, 0.5};
  int replicates = 20;
  std::uint64_t seed = 1;
};

/// Mean amplitude distance between the amplitude prediction and the true
/// amplitude at the target, one entry per grid side.
std::vector<double> scale_study(const ScaleStudyOptions& options);

struct ConfoundingResult {
  VariogramModel raw;        ///< trace-variogram of the observed functions
  VariogramModel amplitude;  ///< pairwise squared amplitude distances
  VariogramModel raw_nugget;
  VariogramModel amplitude_nugget;
  EmpiricalVariogram raw_empirical;
  EmpiricalVariogram amplitude_empirical;
};

ConfoundingResult confounding_demo(const ConfoundingSpec& spec, const BinConfig& binning = {});

}  // namespace apsf
