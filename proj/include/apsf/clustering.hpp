#pragma once

// Spatially weighted amplitude and phase dissimilarities, agglomerative
// hierarchical clustering, and the rand index.

#include <apsf/dataset.hpp>
#include <apsf/variogram.hpp>

#include <string>
#include <vector>

namespace apsf {

struct DissimilarityMatrix {
  Matrix values;
  std::vector<std::string> labels;

  /// Averages with the transpose and zeroes the diagonal.
  void symmetrize();
};

struct Partition {
  std::vector<std::string> sites;
  std::vector<int> labels;  ///< 1..k, numbered by first appearance
  int k = 0;

  int label_of(const std::string& site) const;
};

enum class Linkage { average, complete, single };

Linkage parse_linkage(const std::string& name);

/// Symmetrised pairwise distances from aligning every ordered pair once.
struct PairwiseAlignments {
  Matrix amplitude;  ///< d_a
  Matrix phase;      ///< intrinsic phase distance of the relative warp
  Matrix shape;      ///< d_a between unit-norm SRSFs
};

PairwiseAlignments pairwise_alignments(const std::vector<SrsfFunction>& qs, unsigned threads = 0);

struct WeightedDissimilarity {
  DissimilarityMatrix matrix;
  VariogramModel model;
  double omega = 0.0;
  bool unit_weight = false;  ///< variogram unusable (or spatial weighting disabled): weight 1
};

/// d_a(q_i, q_j) * V_a(|s_i - s_j|), V_a fitted to half mean squared d_a per lag.
WeightedDissimilarity amplitude_dissimilarity_matrix(const SpatialDataset& dataset, bool spatial = true,
                                                     const BinConfig& binning = {});
WeightedDissimilarity amplitude_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                     bool spatial = true, const BinConfig& binning = {});

/// d_p(q_i, q_j) * V_p(enlarged distance at `omega`).
WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, double omega,
                                                 const BinConfig& binning = {});
WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                 double omega, bool spatial = true, const BinConfig& binning = {});
/// Same with omega chosen from `candidates` by the phase variogram fit.
WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                 const std::vector<double>& candidates, bool spatial = true,
                                                 const BinConfig& binning = {});

/// Unaligned baseline: |f_i - f_j| times the fitted trace-variogram.
WeightedDissimilarity l2_dissimilarity_matrix(const SpatialDataset& dataset, bool spatial = true,
                                              const BinConfig& binning = {});

/// Naive agglomerative clustering with Lance-Williams updates, merging the
/// closest pair (lowest index pair on ties) until k clusters remain.
Partition hierarchical_cluster(const DissimilarityMatrix& d, int k, Linkage linkage = Linkage::average);

/// Fraction of unordered site pairs on which the partitions agree.
double rand_index(const Partition& p1, const Partition& p2);

}  // namespace apsf
