#include "support.hpp"

#include <apsf/clustering.hpp>
#include <apsf/metrics.hpp>
#include <apsf/simgen.hpp>

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

using namespace apsf;
using namespace apsf::test;

namespace {

// Agglomeration straight from the linkage definitions: cluster distance is
// recomputed from the original point distances at every step.
std::vector<int> naive_cluster(const Matrix& d, int k, Linkage linkage) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < d.rows(); ++i) clusters.push_back({i});
  auto between = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i : a)
      for (int j : b) {
        sum += d(i, j);
        lo = std::min(lo, d(i, j));
        hi = std::max(hi, d(i, j));
      }
    switch (linkage) {
      case Linkage::average: return sum / (a.size() * b.size());
      case Linkage::complete: return hi;
      case Linkage::single: return lo;
    }
    return 0.0;
  };
  while (static_cast<int>(clusters.size()) > k) {
    std::size_t a = 0, b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double v = between(clusters[i], clusters[j]);
        if (v < best) {
          best = v;
          a = i;
          b = j;
        }
      }
    clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
  }
  std::vector<int> owner(d.rows());
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) owner[i] = static_cast<int>(c);
  std::map<int, int> number;
  std::vector<int> labels;
  for (int o : owner) labels.push_back(number.emplace(o, static_cast<int>(number.size()) + 1).first->second);
  return labels;
}

Partition make_partition(const std::vector<int>& labels) {
  Partition p;
  for (std::size_t i = 0; i < labels.size(); ++i) p.sites.push_back("s" + std::to_string(i));
  p.labels = labels;
  p.k = *std::max_element(labels.begin(), labels.end());
  return p;
}

DissimilarityMatrix line_points(const std::vector<double>& x) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  DissimilarityMatrix d{Matrix::Zero(n, n), {}};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d.values(i, j) = std::abs(x[i] - x[j]);
  return d;
}

SpatialDataset small_cluster_data(std::uint64_t seed, int n) {
  SimDataset sim = gen_cluster_dataset(ClusterSimSpec{.grid_size = 41, .seed = seed});
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return sim.dataset.subset(rows);
}

}  // namespace

TEST_CASE("agglomerative clustering by hand") {
  // Points 0, 1, 4, 6 on a line: {0,1} merge at 1, {4,6} at 2.
  const DissimilarityMatrix d = line_points({0.0, 1.0, 4.0, 6.0});
  for (Linkage l : {Linkage::average, Linkage::complete, Linkage::single}) {
    CHECK(hierarchical_cluster(d, 2, l).labels == std::vector<int>{1, 1, 2, 2});
    CHECK(hierarchical_cluster(d, 3, l).labels == std::vector<int>{1, 1, 2, 3});
  }
  // Average linkage on 0, 1, 3, 7: {0,1} to 3 is 2.5 < 4, so 3 joins them.
  CHECK(hierarchical_cluster(line_points({0, 1, 3, 7}), 2).labels == std::vector<int>{1, 1, 1, 2});
  // Chaining separates single from complete linkage: 0, 3.2, 5, 7, 10.
  const DissimilarityMatrix chain = line_points({0.0, 3.2, 5.0, 7.0, 10.0});
  CHECK(hierarchical_cluster(chain, 2, Linkage::single).labels == std::vector<int>{1, 2, 2, 2, 2});
  CHECK(hierarchical_cluster(chain, 2, Linkage::complete).labels == std::vector<int>{1, 1, 1, 2, 2});

  const Partition all = hierarchical_cluster(d, 4);
  CHECK(all.labels == std::vector<int>{1, 2, 3, 4});
  CHECK(all.sites == std::vector<std::string>{"0", "1", "2", "3"});
  CHECK(hierarchical_cluster(d, 1).labels == std::vector<int>{1, 1, 1, 1});
  CHECK_THROWS_AS(hierarchical_cluster(d, 5), InvalidInput);
  CHECK_THROWS_AS(hierarchical_cluster(d, 0), InvalidInput);
  CHECK_THROWS_AS(hierarchical_cluster(DissimilarityMatrix{Matrix::Zero(2, 3), {}}, 1), InvalidInput);
  // Equal distances everywhere: the lowest index pair merges first.
  DissimilarityMatrix ties{Matrix::Ones(4, 4), {"a", "b", "c", "d"}};
  ties.symmetrize();
  const Partition t = hierarchical_cluster(ties, 3);
  CHECK(t.labels == std::vector<int>{1, 1, 2, 3});
  CHECK(t.label_of("c") == 2);
  CHECK_THROWS_AS(t.label_of("z"), InvalidInput);
}

TEST_CASE("Lance-Williams updates agree with linkage definitions") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + trial % 10;
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
    for (Linkage l : {Linkage::average, Linkage::complete, Linkage::single}) {
      for (int k : {1, 2, 3, n / 2, n}) {
        CAPTURE(trial);
        CAPTURE(k);
        CHECK(hierarchical_cluster(DissimilarityMatrix{d, {}}, k, l).labels == naive_cluster(d, k, l));
      }
    }
  }
}

TEST_CASE("symmetrising a dissimilarity matrix") {
  DissimilarityMatrix d{(Matrix(3, 3) << 5, 1, 2, 3, 6, 4, 8, 0, 7).finished(), {}};
  d.symmetrize();
  const Matrix expected = (Matrix(3, 3) << 0, 2, 5, 2, 0, 2, 5, 2, 0).finished();
  CHECK(max_abs(d.values, expected) == 0.0);
}

TEST_CASE("clustering is invariant to scaling the dissimilarities") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix d = Matrix::Zero(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) d(i, j) = d(j, i) = u(rng);
  const Partition base = hierarchical_cluster(DissimilarityMatrix{d, {}}, 4);
  CHECK(hierarchical_cluster(DissimilarityMatrix{d * 37.5, {}}, 4).labels == base.labels);
  CHECK(hierarchical_cluster(DissimilarityMatrix{d, {}}, 4).labels == base.labels);
}

TEST_CASE("rand index") {
  std::mt19937_64 rng(46);
  std::uniform_int_distribution<int> lab(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> a(8), b(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = lab(rng);
      b[i] = lab(rng);
    }
    const Partition pa = make_partition(a), pb = make_partition(b);
    CHECK(rand_index(pa, pb) == doctest::Approx(pair_count_rand(a, b)).epsilon(1e-15));
    CHECK(rand_index(pa, pb) == doctest::Approx(rand_index(pb, pa)).epsilon(1e-15));
    CHECK(rand_index(pa, pa) == 1.0);

    // Relabelling clusters or reordering sites changes nothing.
    std::vector<int> renamed = a;
    for (int& v : renamed) v = 4 - v;
    CHECK(rand_index(make_partition(renamed), pb) == doctest::Approx(rand_index(pa, pb)).epsilon(1e-15));
    Partition shuffled = pb;
    std::vector<std::size_t> order(8);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < 8; ++i) {
      shuffled.sites[i] = pb.sites[order[i]];
      shuffled.labels[i] = pb.labels[order[i]];
    }
    CHECK(rand_index(pa, shuffled) == doctest::Approx(rand_index(pa, pb)).epsilon(1e-15));
  }
  CHECK(rand_index(make_partition({1, 1, 2, 2}), make_partition({1, 2, 1, 2})) == doctest::Approx(2.0 / 6.0));
  Partition missing = make_partition({1, 1, 2, 2});
  missing.sites[3] = "other";
  CHECK_THROWS_AS(rand_index(make_partition({1, 1, 2, 2}), missing), InvalidInput);
  CHECK_THROWS_AS(rand_index(make_partition({1, 1, 2}), make_partition({1, 1, 2, 2})), InvalidInput);
}

TEST_CASE("weighted dissimilarities") {
  const SpatialDataset data = small_cluster_data(5, 12);
  const PairwiseAlignments pairs = pairwise_alignments(data.srsfs());
  const Matrix dist = site_distance_matrix(data.sites());

  SUBCASE("pairwise alignments are symmetrised alignment costs") {
    const auto qs = data.srsfs();
    const double d01 = 0.5 * (dp_align(qs[0], qs[1]).cost + dp_align(qs[1], qs[0]).cost);
    CHECK(pairs.amplitude(0, 1) == doctest::Approx(d01).epsilon(1e-12));
    CHECK(pairs.amplitude(0, 1) == pairs.amplitude(1, 0));
    CHECK(pairs.phase.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(pairs.shape.maxCoeff() <= 2.0 + 1e-12);
  }
  SUBCASE("entries are the base distance times the fitted variogram") {
    const WeightedDissimilarity amp = amplitude_dissimilarity_matrix(data, pairs);
    const WeightedDissimilarity ph = phase_dissimilarity_matrix(data, pairs, 0.0);
    for (const auto* w : {&amp, &ph}) {
      CHECK(w->matrix.labels == data.ids);
      CHECK(w->matrix.values.diagonal().cwiseAbs().maxCoeff() == 0.0);
      CHECK(max_abs(w->matrix.values, w->matrix.values.transpose()) == 0.0);
    }
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        if (i == j) continue;
        const double wa = amp.unit_weight ? 1.0 : amp.model(dist(i, j));
        const double wp = ph.unit_weight ? 1.0 : ph.model(dist(i, j));
        CHECK(amp.matrix.values(i, j) == doctest::Approx(pairs.amplitude(i, j) * wa).epsilon(1e-12));
        CHECK(ph.matrix.values(i, j) == doctest::Approx(pairs.phase(i, j) * wp).epsilon(1e-12));
      }
    const WeightedDissimilarity flat = amplitude_dissimilarity_matrix(data, pairs, false);
    CHECK(flat.unit_weight);
    CHECK(max_abs(flat.matrix.values, pairs.amplitude) < 1e-15);
    CHECK_THROWS_AS(phase_dissimilarity_matrix(data, pairs, -1.0), InvalidInput);
  }
  SUBCASE("three sites cannot support a variogram: unit weights") {
    const SpatialDataset three = data.subset({0, 1, 2});
    const PairwiseAlignments p3 = pairwise_alignments(three.srsfs());
    const WeightedDissimilarity amp = amplitude_dissimilarity_matrix(three, p3);
    CHECK(amp.unit_weight);
    CHECK(max_abs(amp.matrix.values, p3.amplitude) < 1e-15);
  }
  SUBCASE("the L2 baseline uses unaligned distances") {
    const WeightedDissimilarity l2 = l2_dissimilarity_matrix(data, false);
    const double d = norm(data.grid, data.functions[2].values() - data.functions[7].values());
    CHECK(l2.matrix.values(2, 7) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("dissimilarities are equivariant under site reordering") {
  const SpatialDataset data = small_cluster_data(6, 10);
  std::vector<std::size_t> order{3, 7, 0, 9, 1, 5, 2, 8, 6, 4};
  const SpatialDataset permuted = data.subset(order);
  const Matrix a = amplitude_dissimilarity_matrix(data).matrix.values;
  const Matrix b = amplitude_dissimilarity_matrix(permuted).matrix.values;
  const Matrix c = l2_dissimilarity_matrix(data).matrix.values;
  const Matrix e = l2_dissimilarity_matrix(permuted).matrix.values;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      CHECK(b(i, j) == doctest::Approx(a(order[i], order[j])).epsilon(1e-9));
      CHECK(e(i, j) == doctest::Approx(c(order[i], order[j])).epsilon(1e-9));
    }
}

TEST_CASE("identical functions have zero dissimilarity") {
  const Grid g(41);
  const Vector shape = sample(g, [](double t) { return std::sin(2 * kPi * t) + t; });
  std::vector<SampledFunction> fs;
  for (int i = 0; i < 6; ++i) fs.emplace_back(g, shape, Site(i, 0.5 * i * i));
  const SpatialDataset data = make_dataset(g, fs);
  CHECK(amplitude_dissimilarity_matrix(data).matrix.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(phase_dissimilarity_matrix(data, 0.0).matrix.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(l2_dissimilarity_matrix(data).matrix.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("clustering a simulated design is deterministic") {
  const SpatialDataset data = small_cluster_data(8, 16);
  const PairwiseAlignments p1 = pairwise_alignments(data.srsfs(), 1);
  const PairwiseAlignments p4 = pairwise_alignments(data.srsfs(), 4);
  CHECK(max_abs(p1.amplitude, p4.amplitude) == 0.0);
  CHECK(max_abs(p1.phase, p4.phase) == 0.0);
  const Partition a = hierarchical_cluster(amplitude_dissimilarity_matrix(data, p1).matrix, 4);
  const Partition b = hierarchical_cluster(amplitude_dissimilarity_matrix(data, p4).matrix, 4);
  CHECK(a.labels == b.labels);
  CHECK(a.sites == data.ids);
  CHECK(parse_linkage("single") == Linkage::single);
  CHECK_THROWS_AS(parse_linkage("ward"), InvalidInput);
}
