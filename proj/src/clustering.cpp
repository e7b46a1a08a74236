#include <apsf/clustering.hpp>
#include <apsf/metrics.hpp>
#include <apsf/parallel.hpp>

#include <algorithm>
#include <limits>
#include <map>

namespace apsf {

namespace {

// Fits a model to (distances, sq_values); returns false when the fit is unusable.
bool fit_weight_model(const Matrix& distances, const Matrix& sq_values, const BinConfig& binning,
                      VariogramModel& model) {
  const EmpiricalVariogram emp = empirical_variogram(distances, sq_values, binning);
  if (emp.bins.size() < 3) return false;
  model = fit_matern(emp);
  return !model.degenerate && model.scale > 0.0;
}

WeightedDissimilarity weighted(const SpatialDataset& dataset, const Matrix& base, const Matrix& distances,
                               bool spatial, const BinConfig& binning) {
  WeightedDissimilarity out;
  out.matrix.labels = dataset.ids;
  out.unit_weight = !spatial || !fit_weight_model(distances, base.cwiseAbs2(), binning, out.model);
  const Eigen::Index n = base.rows();
  out.matrix.values = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) out.matrix.values(i, j) = base(i, j) * (out.unit_weight ? 1.0 : out.model(distances(i, j)));
  out.matrix.symmetrize();
  return out;
}

}  // namespace

void DissimilarityMatrix::symmetrize() {
  values = (0.5 * (values + values.transpose())).eval();
  values.diagonal().setZero();
}

int Partition::label_of(const std::string& site) const {
  const auto it = std::find(sites.begin(), sites.end(), site);
  if (it == sites.end()) throw InvalidInput("partition has no site " + site);
  return labels[static_cast<std::size_t>(it - sites.begin())];
}

Linkage parse_linkage(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw InvalidInput("unknown linkage '" + name + "'");
}

PairwiseAlignments pairwise_alignments(const std::vector<SrsfFunction>& qs, unsigned threads) {
  const Eigen::Index n = static_cast<Eigen::Index>(qs.size());
  PairwiseAlignments out{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  std::vector<SrsfFunction> unit;
  for (const auto& q : qs) {
    const double nrm = q.norm();
    if (!(nrm > 0.0)) throw DegenerateInput("pairwise_alignments: zero-norm function");
    unit.emplace_back(q.grid(), q.values() / nrm);
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  // Each ordered pair writes only its own cell.
  parallel_for(
      pairs.size(),
      [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const AlignmentResult a = dp_align(qs[i], qs[j]);
        out.amplitude(i, j) = a.cost;
        out.phase(i, j) = phase_distances(a.warp).intrinsic;
        out.shape(i, j) = dp_align(unit[i], unit[j]).cost;
      },
      threads);
  for (Matrix* m : {&out.amplitude, &out.phase, &out.shape}) *m = (0.5 * (*m + m->transpose())).eval();
  return out;
}

WeightedDissimilarity amplitude_dissimilarity_matrix(const SpatialDataset& dataset, bool spatial,
                                                     const BinConfig& binning) {
  return amplitude_dissimilarity_matrix(dataset, pairwise_alignments(dataset.srsfs()), spatial, binning);
}

WeightedDissimilarity amplitude_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                     bool spatial, const BinConfig& binning) {
  if (dataset.size() < 2) throw InsufficientData("amplitude_dissimilarity_matrix: need two sites");
  return weighted(dataset, pairs.amplitude, site_distance_matrix(dataset.sites()), spatial, binning);
}

WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, double omega,
                                                 const BinConfig& binning) {
  return phase_dissimilarity_matrix(dataset, pairwise_alignments(dataset.srsfs()), omega, true, binning);
}

WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                 double omega, bool spatial, const BinConfig& binning) {
  if (dataset.size() < 2) throw InsufficientData("phase_dissimilarity_matrix: need two sites");
  if (omega < 0.0) throw InvalidInput("phase_dissimilarity_matrix: omega must be >= 0");
  const Matrix dist = enlarged_distance_matrix(site_distance_matrix(dataset.sites()), pairs.shape, omega);
  WeightedDissimilarity out = weighted(dataset, pairs.phase, dist, spatial, binning);
  out.omega = omega;
  return out;
}

WeightedDissimilarity phase_dissimilarity_matrix(const SpatialDataset& dataset, const PairwiseAlignments& pairs,
                                                 const std::vector<double>& candidates, bool spatial,
                                                 const BinConfig& binning) {
  double omega = 0.0;
  if (spatial) {
    omega = select_omega(site_distance_matrix(dataset.sites()), pairs.shape, pairs.phase.cwiseAbs2(), candidates,
                         binning)
                .omega;
  }
  return phase_dissimilarity_matrix(dataset, pairs, omega, spatial, binning);
}

WeightedDissimilarity l2_dissimilarity_matrix(const SpatialDataset& dataset, bool spatial, const BinConfig& binning) {
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  if (n < 2) throw InsufficientData("l2_dissimilarity_matrix: need two sites");
  Matrix base = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      base(i, j) = base(j, i) = norm(dataset.grid, dataset.functions[i].values() - dataset.functions[j].values());
  return weighted(dataset, base, site_distance_matrix(dataset.sites()), spatial, binning);
}

Partition hierarchical_cluster(const DissimilarityMatrix& d, int k, Linkage linkage) {
  const Eigen::Index n = d.values.rows();
  if (d.values.cols() != n || n == 0) throw InvalidInput("hierarchical_cluster: matrix must be square and non-empty");
  if (k < 1 || k > n) throw InvalidInput("hierarchical_cluster: k must lie in [1, n]");
  if (!d.labels.empty() && static_cast<Eigen::Index>(d.labels.size()) != n) {
    throw InvalidInput("hierarchical_cluster: label count does not match matrix");
  }

  Matrix dist = 0.5 * (d.values + d.values.transpose());
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<int> size(static_cast<std::size_t>(n), 1);
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(n));  // point -> representative cluster
  for (Eigen::Index i = 0; i < n; ++i) owner[i] = i;

  for (Eigen::Index clusters = n; clusters > k; --clusters) {
    Eigen::Index a = -1, b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (active[j] && dist(i, j) < best) {
          best = dist(i, j);
          a = i;
          b = j;
        }
      }
    }
    if (a < 0) {  // all remaining distances are infinite or NaN: merge the first two
      for (Eigen::Index i = 0; i < n && b < 0; ++i) {
        if (!active[i]) continue;
        if (a < 0) a = i; else b = i;
      }
    }
    // Lance-Williams update into cluster a; cluster b retires.
    for (Eigen::Index m = 0; m < n; ++m) {
      if (!active[m] || m == a || m == b) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::average:
          v = (size[a] * dist(a, m) + size[b] * dist(b, m)) / (size[a] + size[b]);
          break;
        case Linkage::complete:
          v = std::max(dist(a, m), dist(b, m));
          break;
        case Linkage::single:
          v = std::min(dist(a, m), dist(b, m));
          break;
      }
      dist(a, m) = dist(m, a) = v;
    }
    size[a] += size[b];
    active[b] = false;
    for (auto& o : owner)
      if (o == b) o = a;
  }

  Partition p;
  p.k = k;
  std::map<Eigen::Index, int> number;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto it = number.find(owner[i]);
    if (it == number.end()) it = number.emplace(owner[i], static_cast<int>(number.size()) + 1).first;
    p.labels.push_back(it->second);
    p.sites.push_back(d.labels.empty() ? std::to_string(i) : d.labels[i]);
  }
  return p;
}

double rand_index(const Partition& p1, const Partition& p2) {
  const std::size_t n = p1.sites.size();
  if (p2.sites.size() != n || p1.labels.size() != n || p2.labels.size() != n) {
    throw InvalidInput("rand_index: partitions cover different sites");
  }
  if (n < 2) return 1.0;
  std::map<std::string, int> second;
  for (std::size_t i = 0; i < n; ++i) second[p2.sites[i]] = p2.labels[i];
  if (second.size() != n) throw InvalidInput("rand_index: duplicate site");
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = second.find(p1.sites[i]);
    if (it == second.end()) throw InvalidInput("rand_index: site " + p1.sites[i] + " missing from second partition");
    table[{p1.labels[i], it->second}] += 1.0;
    rows[p1.labels[i]] += 1.0;
    cols[it->second] += 1.0;
  }
  auto pairs = [](double m) { return 0.5 * m * (m - 1.0); };
  double same_both = 0.0, same_1 = 0.0, same_2 = 0.0;
  for (const auto& [key, c] : table) same_both += pairs(c);
  for (const auto& [key, c] : rows) same_1 += pairs(c);
  for (const auto& [key, c] : cols) same_2 += pairs(c);
  const double total = pairs(static_cast<double>(n));
  return (total - same_1 - same_2 + 2.0 * same_both) / total;
}

}  // namespace apsf
