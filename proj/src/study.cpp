#include <apsf/preprocess.hpp>
#include <apsf/study.hpp>

namespace apsf {

KrigingReplicate kriging_replicate(const KrigingStudyOptions& options, int replicate) {
  KrigingSimSpec spec = options.sim;
  spec.seed = derive_seed(options.seed, static_cast<std::uint64_t>(replicate));
  const SimDataset sim = gen_kriging_dataset(spec);
  const SpatialDataset data = smooth_dataset(sim.dataset, options.iota);

  KrigingConfig config = options.config;
  config.seed = spec.seed;
  ShapeDistanceCache cache;
  const LoocvReport apk = loocv_metrics(data, config, Method::apk, {}, &cache);
  const LoocvReport ok = loocv_metrics(data, config, Method::ok);
  return KrigingReplicate{spec.seed, apk.mean, ok.mean, apk.failed, ok.failed};
}

std::vector<KrigingReplicate> kriging_study(const KrigingStudyOptions& options) {
  std::vector<KrigingReplicate> out;
  for (int r = 0; r < options.replicates; ++r) out.push_back(kriging_replicate(options, r));
  return out;
}

ClusterOutcome cluster_dataset(const SpatialDataset& dataset, int k, Linkage linkage,
                               const std::vector<double>& omega_candidates, bool spatial) {
  const PairwiseAlignments pairs = pairwise_alignments(dataset.srsfs());
  ClusterOutcome out;
  out.amplitude_matrix = amplitude_dissimilarity_matrix(dataset, pairs, spatial);
  out.phase_matrix = phase_dissimilarity_matrix(dataset, pairs, omega_candidates, spatial);
  out.l2_matrix = l2_dissimilarity_matrix(dataset, spatial);
  out.amplitude = hierarchical_cluster(out.amplitude_matrix.matrix, k, linkage);
  out.phase = hierarchical_cluster(out.phase_matrix.matrix, k, linkage);
  out.l2 = hierarchical_cluster(out.l2_matrix.matrix, k, linkage);
  return out;
}

ClusterReplicate cluster_replicate(const ClusterStudyOptions& options, int replicate) {
  ClusterSimSpec spec = options.sim;
  spec.seed = derive_seed(options.seed, static_cast<std::uint64_t>(replicate));
  const SimDataset sim = gen_cluster_dataset(spec);
  const SpatialDataset data = smooth_dataset(sim.dataset, options.iota);
  const ClusterOutcome c = cluster_dataset(data, options.k, options.linkage, options.omega_candidates);
  return ClusterReplicate{spec.seed,
                          rand_index(c.amplitude, sim.amplitude_partition),
                          rand_index(c.phase, sim.phase_partition),
                          rand_index(c.l2, sim.amplitude_partition),
                          rand_index(c.l2, sim.phase_partition)};
}

std::vector<ClusterReplicate> cluster_study(const ClusterStudyOptions& options) {
  std::vector<ClusterReplicate> out;
  for (int r = 0; r < options.replicates; ++r) out.push_back(cluster_replicate(options, r));
  return out;
}

std::vector<double> scale_study(const ScaleStudyOptions& options) {
  std::vector<double> means;
  for (int side : options.grid_sides) {
    double total = 0.0;
    for (int r = 0; r < options.replicates; ++r) {
      ScaleSimSpec spec = options.sim;
      spec.grid_side = side;
      spec.seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
      const ScaleSim sim = gen_scale_dataset(spec, options.target);
      const AmplitudeKrigingResult res = amplitude_krige(sim.sim.dataset, options.target, options.config);
      total += amplitude_distance(res.amplitude, sim.target_amplitude);
    }
    means.push_back(total / options.replicates);
  }
  return means;
}

ConfoundingResult confounding_demo(const ConfoundingSpec& spec, const BinConfig& binning) {
  const SimDataset sim = gen_confounding_dataset(spec);
  const SpatialDataset& d = sim.dataset;
  const Matrix dist = site_distance_matrix(d.sites());
  std::vector<Vector> values;
  for (const auto& f : d.functions) values.push_back(f.values());

  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  const std::vector<SrsfFunction> qs = d.srsfs();
  Matrix amp = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = 0.5 * (amplitude_distance(qs[i], qs[j]) + amplitude_distance(qs[j], qs[i]));
      amp(i, j) = amp(j, i) = a * a;
    }
  }
  ConfoundingResult out;
  out.raw_empirical = empirical_variogram(dist, values, d.grid, binning);
  out.amplitude_empirical = empirical_variogram(dist, amp, binning);
  out.raw = fit_matern(out.raw_empirical);
  out.amplitude = fit_matern(out.amplitude_empirical);
  out.raw_nugget = fit_matern(out.raw_empirical, FitOptions{true});
  out.amplitude_nugget = fit_matern(out.amplitude_empirical, FitOptions{true});
  return out;
}

}  // namespace apsf
