#include "support.hpp"

#include <apsf/kriging.hpp>
#include <apsf/loocv.hpp>
#include <apsf/simgen.hpp>

#include <doctest.h>

#include <limits>
#include <mutex>

using namespace apsf;
using namespace apsf::test;

namespace {

double quad(const Matrix& v, const Vector& w) { return w.dot(v * w); }

Matrix random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

// Brute-force minimum of w'Vw over sum(w)=1 (n = 4): a coarse grid over the
// three free coordinates, then a fine grid around the best coarse point.
double simplex_scan_minimum(const Matrix& v) {
  auto objective = [&](double a, double b, double c) {
    const Vector w = (Vector(4) << a, b, c, 1.0 - a - b - c).finished();
    return quad(v, w);
  };
  double best = std::numeric_limits<double>::infinity();
  double ba = 0, bb = 0, bc = 0;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 60; ++j)
      for (int k = 0; k <= 60; ++k) {
        const double a = -1.0 + 0.05 * i, b = -1.0 + 0.05 * j, c = -1.0 + 0.05 * k;
        const double f = objective(a, b, c);
        if (f < best) {
          best = f;
          ba = a;
          bb = b;
          bc = c;
        }
      }
  const double ca = ba, cb = bb, cc = bc;
  for (int i = -50; i <= 50; ++i)
    for (int j = -50; j <= 50; ++j)
      for (int k = -50; k <= 50; ++k)
        best = std::min(best, objective(ca + 0.001 * i, cb + 0.001 * j, cc + 0.001 * k));
  return best;
}

SpatialDataset constant_dataset(const Grid& grid, const std::vector<Site>& sites, const std::vector<double>& levels) {
  std::vector<SampledFunction> fs;
  for (std::size_t i = 0; i < sites.size(); ++i) fs.emplace_back(grid, Vector::Constant(grid.size(), levels[i]), sites[i]);
  return make_dataset(grid, std::move(fs));
}

std::vector<Site> grid_sites(int side, double lo, double hi) {
  std::vector<Site> out;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      out.emplace_back(lo + (hi - lo) * c / (side - 1), lo + (hi - lo) * r / (side - 1));
  return out;
}

KrigingConfig fast_config() {
  KrigingConfig c;
  c.lambda_grid = {0.0, 0.1};
  c.cv_repeats = 1;
  return c;
}

}  // namespace

TEST_CASE("sum-one weights") {
  CHECK(solve_sum_one_weights(Matrix::Constant(1, 1, 3.0)).weights(0) == 1.0);

  const Matrix sym = (Matrix(2, 2) << 2.0, 0.5, 0.5, 2.0).finished();
  const WeightSolution half = solve_sum_one_weights(sym);
  CHECK(half.weights(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.weights(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(half.regularized);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix v = random_spd(4, rng);
    const WeightSolution s = solve_sum_one_weights(v);
    CHECK(std::abs(s.weights.sum() - 1.0) < 1e-12);
    const double scan = simplex_scan_minimum(v);
    CHECK(quad(v, s.weights) <= scan + 1e-12);
    CHECK(std::abs(quad(v, s.weights) - scan) < 1e-4);
  }

  // A singular system is regularised and flagged rather than rejected.
  const WeightSolution flat = solve_sum_one_weights(Matrix::Zero(3, 3));
  CHECK(flat.regularized);
  CHECK(std::abs(flat.weights.sum() - 1.0) < 1e-12);
}

TEST_CASE("positive weights") {
  std::mt19937_64 rng(37);
  SUBCASE("already positive solution is kept") {
    const Matrix v = (Matrix(3, 3) << 2, 0.3, 0.2, 0.3, 2, 0.1, 0.2, 0.1, 2).finished();
    const WeightSolution a = solve_sum_one_weights(v);
    REQUIRE((a.weights.array() > 0.0).all());
    const WeightSolution b = solve_positive_weights(v, 1e-6);
    CHECK(max_abs(a.weights, b.weights) == 0.0);
    CHECK_FALSE(b.fallback_uniform);
  }
  SUBCASE("dominated site sits at the floor") {
    // Objective for w = (1 - x, x): x^2 V11 ... minimised at a negative x.
    const Matrix v = (Matrix(2, 2) << 1.0, 1.5, 1.5, 4.0).finished();
    REQUIRE(solve_sum_one_weights(v).weights(1) < 0.0);
    const double floor = 1e-3;
    const WeightSolution s = solve_positive_weights(v, floor);
    double best_x = floor, best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 100000; ++k) {
      const double x = floor + (1.0 - 2.0 * floor) * k / 100000.0;
      const double f = quad(v, (Vector(2) << 1.0 - x, x).finished());
      if (f < best) {
        best = f;
        best_x = x;
      }
    }
    CHECK(s.weights(1) == doctest::Approx(best_x).epsilon(1e-9));
    CHECK(s.weights(1) == doctest::Approx(floor).epsilon(1e-12));
    CHECK(s.weights(0) == doctest::Approx(1.0 - floor).epsilon(1e-12));
  }
  SUBCASE("constraints always hold") {
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 7;
      Matrix v(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = z(rng);
      v = 0.5 * (v + v.transpose()).eval();
      const double floor = 1e-4;
      const WeightSolution s = solve_positive_weights(v, floor);
      CHECK(std::abs(s.weights.sum() - 1.0) < 1e-12);
      CHECK((s.weights.array() >= floor - 1e-15).all());
    }
  }
  CHECK_THROWS_AS(solve_positive_weights(Matrix::Identity(4, 4), 0.3), InvalidInput);
  CHECK_THROWS_AS(solve_positive_weights(Matrix::Identity(4, 4), 0.0), InvalidInput);
}

TEST_CASE("kriging matrix entries") {
  const VariogramModel m{2.0, 1.0};
  const Matrix pd = (Matrix(2, 2) << 0, 1.5, 1.5, 0).finished();
  const Vector td = (Vector(2) << 0.5, 1.0).finished();
  const Matrix k = kriging_matrix(m, pd, td);
  CHECK(k(0, 0) == doctest::Approx(2 * m(0.5)));
  CHECK(k(1, 1) == doctest::Approx(2 * m(1.0)));
  CHECK(k(0, 1) == doctest::Approx(m(0.5) + m(1.0) - m(1.5)));
  CHECK(k(1, 0) == doctest::Approx(k(0, 1)));
}

TEST_CASE("translation kriging") {
  const std::vector<Site> sites = grid_sites(5, -2.0, 2.0);
  CHECK(translation_krige(std::vector<double>(25, 3.25), sites, Site(0.3, 0.1)) == 3.25);

  const std::vector<Site> pair{Site(-1.0, 0.0), Site(1.0, 0.0)};
  CHECK(translation_krige({2.0, 6.0}, pair, Site(0.0, 0.7)) == doctest::Approx(4.0).epsilon(1e-12));

  std::vector<double> plane;
  for (const Site& s : sites) plane.push_back(10.0 + 1.5 * s.x() - 0.8 * s.y());
  for (const Site& target : {Site(0.3, -0.7), Site(-1.2, 0.4), Site(0.5, 0.5)}) {
    const double expected = 10.0 + 1.5 * target.x() - 0.8 * target.y();
    CHECK(std::abs(translation_krige(plane, sites, target) - expected) < 0.1 * std::abs(expected));
  }
}

TEST_CASE("combining amplitude, phase and translation") {
  const Grid g(101);
  const SampledFunction line(g, g.points());
  const SrsfFunction q = srsf_transform(line);
  const WarpingFunction id = WarpingFunction::identity(g);

  CHECK(max_abs(combine_prediction(q, id, 0.0).values(), srsf_inverse(q).values()) < 1e-12);
  CHECK(max_abs(combine_prediction(q, id, 5.0).values(), (g.points().array() + 5.0).matrix()) < 1e-12);

  // Decompose f into an aligned srsf and a phase, then recombine.
  const SampledFunction f(g, sample(g, [](double t) { return std::sin(2 * kPi * t) + 2.0 * t + 1.0; }));
  const WarpingFunction gamma = exp_warp(g, 1.3);
  const SrsfFunction aligned = group_action(srsf_transform(f), gamma);
  const SampledFunction back = combine_prediction(aligned, gamma, f.values()(0));
  CHECK(max_abs(back.values(), f.values()) < 1e-2);
}

TEST_CASE("amplitude kriging") {
  const Grid g(101);
  const SrsfFunction mu = srsf_transform(SampledFunction(g, sample(g, [](double t) {
    return -std::cos(2 * kPi * t) * 3.0;
  })));
  const KrigingConfig config = fast_config();

  SUBCASE("identical observations") {
    std::vector<SrsfFunction> qs(5, mu);
    std::vector<Site> sites{Site(0, 0), Site(1, 0), Site(0, 1), Site(1, 1), Site(2, 2)};
    const AmplitudeKrigingResult r = amplitude_krige(qs, sites, Site(0.4, 0.6), config);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(max_abs(r.amplitude.values(), mu.values()) < 1e-12);
    CHECK(std::abs(r.weights.sum() - 1.0) < 1e-9);
  }
  SUBCASE("mirror-symmetric warps of one shape") {
    const WarpingFunction gamma = exp_warp(g, 1.0);
    std::vector<SrsfFunction> qs{group_action(mu, gamma), group_action(mu, warp_invert(gamma))};
    std::vector<Site> sites{Site(-1, 0), Site(1, 0)};
    const AmplitudeKrigingResult r = amplitude_krige(qs, sites, Site(0, 0), config);
    CHECK(amplitude_distance(r.amplitude, mu) < 0.05 * mu.norm());
    CHECK(r.weights(0) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("termination report") {
    SimDataset sim = gen_kriging_dataset(KrigingSimSpec{.grid_size = 51, .seed = 4});
    const AmplitudeKrigingResult r = amplitude_krige(sim.dataset, Site(0.5, 0.5), config);
    CHECK(r.iterations >= 1);
    CHECK(r.iterations <= config.max_iterations);
    CHECK((r.converged ? r.last_change < config.tolerance : r.iterations == config.max_iterations));
    CHECK(std::abs(r.weights.sum() - 1.0) < 1e-9);
    CHECK(r.phases.size() == sim.dataset.size());
  }
}

TEST_CASE("phase kriging") {
  const Grid g(101);
  const KrigingConfig config = fast_config();
  const Matrix pd = (Matrix(3, 3) << 0, 1, 2, 1, 0, 1, 2, 1, 0).finished();
  const Vector td = (Vector(3) << 0.5, 0.5, 1.5).finished();

  const std::vector<PsiFunction> ids(3, PsiFunction::identity(g));
  const PhaseKrigingResult r = phase_krige(ids, pd, td, config);
  CHECK(max_abs(r.phase.values(), g.points()) < 1e-12);
  CHECK(std::abs(norm(g, r.psi.values()) - 1.0) < 1e-12);
  CHECK(std::abs(r.weights.sum() - 1.0) < 1e-9);
  CHECK((r.weights.array() > 0.0).all());

  // psi = c (1 +/- eps sin 2 pi t): equal weights average back to the identity.
  const double c = 1.0 / std::sqrt(1.0 + 0.5 * 0.3 * 0.3);
  const Vector bump = sample(g, [](double t) { return 0.3 * std::sin(2 * kPi * t); });
  const std::vector<PsiFunction> mirrored{PsiFunction(g, c * (Vector::Ones(101) + bump)),
                                          PsiFunction(g, c * (Vector::Ones(101) - bump))};
  const Matrix pd2 = (Matrix(2, 2) << 0, 2, 2, 0).finished();
  const PhaseKrigingResult m = phase_krige(mirrored, pd2, Vector::Constant(2, 1.0), config);
  CHECK(m.weights(0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(max_abs(m.phase.values(), g.points()) < 0.02);
  CHECK(std::abs(norm(g, m.psi.values()) - 1.0) < 1e-12);
}

TEST_CASE("ordinary functional kriging baseline") {
  const Grid g(51);
  const std::vector<Site> sites = grid_sites(3, 0.0, 2.0);
  const Vector shape = sample(g, [](double t) { return std::sin(2 * kPi * t); });
  std::vector<SampledFunction> same;
  for (const Site& s : sites) same.emplace_back(g, shape, s);
  const SampledFunction pred = ordinary_krige_functional(make_dataset(g, same), Site(0.4, 1.3));
  CHECK(max_abs(pred.values(), shape) < 1e-12);

  std::vector<double> levels;
  for (const Site& s : sites) levels.push_back(1.0 + s.x() * s.x() - 0.5 * s.y());
  const SpatialDataset constants = constant_dataset(g, sites, levels);
  Vector w;
  const SampledFunction flat = ordinary_krige_functional(constants, Site(0.7, 1.1), {}, &w);
  CHECK(std::abs(w.sum() - 1.0) < 1e-9);
  CHECK(flat.values()(0) == doctest::Approx(translation_krige(levels, sites, Site(0.7, 1.1))).epsilon(1e-12));
  CHECK(max_abs(flat.values(), Vector::Constant(51, flat.values()(0))) < 1e-12);
}

TEST_CASE("combined prediction invariants") {
  SimDataset sim = gen_kriging_dataset(KrigingSimSpec{.grid_size = 51, .seed = 9});
  const SpatialDataset training = sim.dataset.without(12);
  const KrigingResult r = amplitude_phase_krige(training, sim.dataset.functions[12].site(), fast_config());
  CHECK(std::abs(r.amp_weights.sum() - 1.0) < 1e-9);
  CHECK(std::abs(r.phase_weights.sum() - 1.0) < 1e-9);
  CHECK((r.phase_weights.array() > 0.0).all());
  for (Eigen::Index m = 1; m < r.phase.values().size(); ++m) CHECK(r.phase.values()(m) > r.phase.values()(m - 1));
  CHECK(r.combined.values().allFinite());
  CHECK(r.lambda >= 0.0);

  // One observation: the prediction is that observation.
  const SpatialDataset single = sim.dataset.subset({3});
  const KrigingResult one = amplitude_phase_krige(single, Site(9, 9), fast_config());
  CHECK(max_abs(one.combined.values(), single.functions[0].values()) == 0.0);
  CHECK(max_abs(one.phase.values(), single.grid.points()) == 0.0);

  KrigingConfig bad = fast_config();
  bad.omega_candidates = {1.0};
  CHECK_THROWS_AS(amplitude_phase_krige(training, Site(0, 0), bad), InvalidInput);
  bad = fast_config();
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("error metrics") {
  const Grid g(101);
  const SampledFunction f(g, sample(g, [](double t) { return std::sin(2 * kPi * t) + t; }));
  const ErrorMetrics zero = prediction_errors(f, f);
  for (double e : zero) CHECK(std::abs(e) < 1e-12);

  const SampledFunction shifted(g, f.values().array() + 0.3);
  const ErrorMetrics e = prediction_errors(shifted, f);
  CHECK(e[4] == doctest::Approx(0.09).epsilon(1e-9));
  CHECK(e[2] < 1e-12);  // same srsf
  for (double v : e) CHECK(v >= 0.0);
}

TEST_CASE("leave-one-out never reads the held-out site") {
  KrigingSimSpec spec{.grid_size = 41, .seed = 21};
  const SimDataset sim = gen_kriging_dataset(spec);
  const SpatialDataset data = sim.dataset.subset({0, 2, 6, 7, 11, 13});
  const KrigingConfig config = fast_config();

  for (Method method : {Method::ok, Method::apk}) {
    std::vector<std::size_t> seen;
    std::mutex mutex;
    LoocvOptions options;
    options.keep_predictions = true;
    options.on_fold = [&](std::size_t held, const SpatialDataset& training) {
      std::lock_guard<std::mutex> lock(mutex);
      seen.push_back(held);
      CHECK(training.size() == data.size() - 1);
      for (const auto& id : training.ids) CHECK(id != data.ids[held]);
    };
    const LoocvReport base = loocv_metrics(data, config, method, options);
    CHECK(seen.size() == data.size());
    CHECK(base.failed == 0);
    CHECK(base.folds.size() == data.size());

    // Corrupt one site's curve: its own fold must not notice.
    SpatialDataset corrupted = data;
    const std::size_t k = 3;
    corrupted.functions[k] = SampledFunction(data.grid, data.functions[k].values() * -40.0 + Vector::Ones(41),
                                             data.functions[k].site());
    options.on_fold = nullptr;
    const LoocvReport other = loocv_metrics(corrupted, config, method, options);
    REQUIRE(base.folds[k].prediction.has_value());
    REQUIRE(other.folds[k].prediction.has_value());
    CHECK(max_abs(base.folds[k].prediction->values(), other.folds[k].prediction->values()) == 0.0);
    for (double v : base.mean) CHECK(v >= 0.0);
  }
  CHECK_THROWS_AS(loocv_metrics(data.subset({0, 1}), config, Method::ok), InsufficientData);
}

TEST_CASE("baseline predictions are flatter than amplitude-phase predictions") {
  // Predict the centre of the bimodal design from the other 24 sites.
  int flatter = 0;
  const int replicates = 10;
  for (int r = 0; r < replicates; ++r) {
    const SimDataset sim = gen_kriging_dataset(KrigingSimSpec{.noise_sd = 0.0, .seed = derive_seed(77, r)});
    const SpatialDataset training = sim.dataset.without(12);
    const Site target = sim.dataset.functions[12].site();
    const SampledFunction ok = ordinary_krige_functional(training, target);
    const SampledFunction apk = amplitude_phase_krige(training, target, fast_config()).combined;
    const double ok_peak = ok.values().maxCoeff() - ok.values().minCoeff();
    const double apk_peak = apk.values().maxCoeff() - apk.values().minCoeff();
    if (ok_peak < apk_peak) ++flatter;
  }
  CHECK(flatter >= 8);
}
