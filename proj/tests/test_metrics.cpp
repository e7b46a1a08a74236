#include "support.hpp"

#include <apsf/metrics.hpp>

#include <doctest.h>

#include <limits>
#include <numeric>

using namespace apsf;
using namespace apsf::test;

namespace {

double exhaustive_minimum(const SrsfFunction& q1, const SrsfFunction& q2, double lambda, long long* count = nullptr) {
  return apsf::test::exhaustive_minimum(q1.values(), q2.values(), q1.grid().spacing(), lambda, count);
}

SrsfFunction smooth_srsf(const Grid& g, std::mt19937_64& rng) {
  return srsf_transform(SampledFunction(g, random_smooth(g, rng)));
}

}  // namespace

TEST_CASE("slope neighbourhood") {
  const auto steps = dp_steps(6);
  CHECK(steps.size() == 23);
  CHECK(steps.front().dt == 1);
  CHECK(steps.front().dg == 1);
  for (const auto& s : steps) {
    CHECK(std::gcd(s.dt, s.dg) == 1);
    CHECK(s.dt <= 6);
    CHECK(s.dg <= 6);
  }
  CHECK(dp_steps(1).size() == 1);
}

TEST_CASE("dynamic programming matches exhaustive path search") {
  std::mt19937_64 rng(21);
  for (Eigen::Index T : {8, 12, 16}) {
    const Grid g(T);
    for (int trial = 0; trial < (T == 16 ? 2 : 4); ++trial) {
      const SrsfFunction q1 = smooth_srsf(g, rng);
      const SrsfFunction q2 = smooth_srsf(g, rng);
      for (double lambda : {0.0, 0.3}) {
        long long count = 0;
        const double oracle = exhaustive_minimum(q1, q2, lambda, &count);
        const AlignmentResult r = penalized_align(q1, q2, lambda);
        CAPTURE(T);
        CAPTURE(lambda);
        CHECK(count > 0);
        CHECK(std::abs(r.cost * r.cost - oracle) < 1e-9);
      }
    }
  }
}

TEST_CASE("lattice objective of a path agrees with the independent evaluation") {
  const Grid g(13);
  std::mt19937_64 rng(5);
  const SrsfFunction q1 = smooth_srsf(g, rng);
  const SrsfFunction q2 = smooth_srsf(g, rng);
  const std::vector<std::pair<int, int>> path{{0, 0}, {1, 3}, {4, 5}, {6, 6}, {11, 7}, {12, 12}};
  double oracle = 0.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    oracle += segment_objective(q1.values(), q2.values(), g.spacing(), path[s].first, path[s].second,
                                path[s + 1].first, path[s + 1].second, 0.7);
  }
  CHECK(std::abs(lattice_path_objective(q1, q2, path, 0.7) - oracle) < 1e-12);
  CHECK_THROWS_AS(lattice_path_objective(q1, q2, {{0, 0}, {5, 5}}), InvalidInput);
}

TEST_CASE("alignment basics") {
  const Grid g(101);
  const SrsfFunction q = srsf_transform(SampledFunction(g, sample(g, [](double t) {
    return std::sin(2 * kPi * t) + 0.3 * std::sin(6 * kPi * t);
  })));

  const AlignmentResult self = dp_align(q, q);
  CHECK(self.cost == 0.0);
  CHECK(max_abs(self.warp.values(), g.points()) == 0.0);

  for (double a : {-1.5, 0.8, 2.0}) {
    const WarpingFunction gamma = exp_warp(g, a);
    const SrsfFunction moved = group_action(q, gamma);
    const AlignmentResult r = dp_align(q, moved);
    CAPTURE(a);
    CHECK(max_abs(r.warp.values(), warp_invert(gamma).values()) < 0.02);
    CHECK(r.cost < 0.05 * q.norm());
    CHECK(max_abs(r.aligned.values(), group_action(moved, r.warp).values()) < 1e-12);
  }
}

TEST_CASE("penalised alignment") {
  const Grid g(101);
  std::mt19937_64 rng(8);
  const SrsfFunction q1 = smooth_srsf(g, rng);
  const SrsfFunction q2 = group_action(smooth_srsf(g, rng), exp_warp(g, 1.2));

  const AlignmentResult plain = dp_align(q1, q2);
  const AlignmentResult zero = penalized_align(q1, q2, 0.0);
  CHECK(plain.cost == zero.cost);
  CHECK(max_abs(plain.warp.values(), zero.warp.values()) == 0.0);

  const AlignmentResult stiff = penalized_align(q1, q2, 1e6);
  CHECK(max_abs(stiff.warp.values(), g.points()) < 1e-3);

  const double identity_objective = std::pow(norm(g, q1.values() - q2.values()), 2);
  double previous = 0.0;
  for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double objective = std::pow(penalized_align(q1, q2, lambda).cost, 2);
    CHECK(objective <= identity_objective + 1e-9);
    CHECK(objective >= previous - 1e-12);
    previous = objective;
  }
  CHECK_THROWS_AS(penalized_align(q1, q2, -1.0), InvalidInput);
}

TEST_CASE("amplitude and shape distances") {
  const Grid g(101);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const SrsfFunction q1 = smooth_srsf(g, rng);
    const SrsfFunction q2 = smooth_srsf(g, rng);
    const WarpingFunction gamma = exp_warp(g, 1.0 - 0.5 * trial);

    CHECK(amplitude_distance(q1, q1) == 0.0);
    CHECK(amplitude_distance(q1, q2) <= norm(g, q1.values() - q2.values()) + 1e-9);
    CHECK(amplitude_distance(q1, group_action(q1, gamma)) < 0.05 * q1.norm());

    // Symmetry and invariance to a common warp hold up to discretisation.
    const double d12 = amplitude_distance(q1, q2);
    CHECK(std::abs(d12 - amplitude_distance(q2, q1)) < 0.05);
    CHECK(std::abs(d12 - amplitude_distance(group_action(q1, gamma), group_action(q2, gamma))) < 0.05);

    CHECK(shape_distance(q1, SrsfFunction(g, 3.7 * q1.values())) < 1e-9);
    CHECK(shape_distance(q1, q1) == 0.0);
    CHECK(shape_distance(q1, q2) <= 2.0);
  }
  const SrsfFunction zero(g, Vector::Zero(101));
  CHECK_THROWS_AS(shape_distance(zero, SrsfFunction(g, Vector::Ones(101))), DegenerateInput);
}

TEST_CASE("phase distances") {
  const Grid g(101);
  std::mt19937_64 rng(17);
  const SrsfFunction q = smooth_srsf(g, rng);
  const PhaseDistances same = phase_distance(q, q);
  CHECK(std::abs(same.intrinsic) < 1e-7);
  CHECK(same.extrinsic < 1e-7);

  for (int trial = 0; trial < 8; ++trial) {
    const SrsfFunction a = smooth_srsf(g, rng);
    const SrsfFunction b = smooth_srsf(g, rng);
    const PhaseDistances d = phase_distance(a, b);
    CHECK(d.intrinsic >= 0.0);
    CHECK(d.intrinsic <= kPi / 2);
    CHECK(std::abs(d.extrinsic * d.extrinsic - (2.0 - 2.0 * std::cos(d.intrinsic))) < 1e-6);
  }
  for (double c : {-2.0, -0.5, 1.0, 2.5}) {
    const SrsfFunction moved = group_action(q, exp_warp(g, c));
    CHECK(std::abs(phase_distance(q, moved).intrinsic - phase_distance(moved, q).intrinsic) < 0.05);
  }

  const PsiFunction p1 = warp_to_psi(exp_warp(g, 1.0));
  const PsiFunction p2 = warp_to_psi(exp_warp(g, -1.0));
  CHECK(std::abs(extrinsic_distance(p1, p2) - norm(g, p1.values() - p2.values())) < 1e-15);
  CHECK(extrinsic_distance(p1, p1) == 0.0);
}
