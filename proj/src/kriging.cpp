#include <apsf/kriging.hpp>
#include <apsf/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace apsf {

namespace {

Vector distances_to(const std::vector<Site>& sites, const Site& target) {
  Vector d(static_cast<Eigen::Index>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i) d(static_cast<Eigen::Index>(i)) = (sites[i] - target).norm();
  return d;
}

Matrix pairwise_sq_l2(const Grid& grid, const std::vector<Vector>& values) {
  const Eigen::Index n = static_cast<Eigen::Index>(values.size());
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vector diff = values[i] - values[j];
      sq(i, j) = sq(j, i) = inner(grid, diff, diff);
    }
  }
  return sq;
}

// Solves [2V 1; 1' 0][w; mu] = [rhs; total]. Returns false when singular.
bool solve_kkt(const Matrix& v, const Vector& rhs, double total, Vector& w) {
  const Eigen::Index n = v.rows();
  Matrix kkt = Matrix::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = 2.0 * v;
  kkt.topRightCorner(n, 1).setOnes();
  kkt.bottomLeftCorner(1, n).setOnes();
  Vector b(n + 1);
  b.head(n) = rhs;
  b(n) = total;
  Eigen::FullPivLU<Matrix> lu(kkt);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return false;
  const Vector x = lu.solve(b);
  if (!x.allFinite()) return false;
  w = x.head(n);
  return true;
}

double jitter_for(const Matrix& v) {
  const double scale = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
  return 1e-10 * (scale > 0.0 ? scale : 1.0);
}

SrsfFunction weighted_sum(const std::vector<SrsfFunction>& items, const Vector& w, const Site& site) {
  Vector acc = Vector::Zero(items.front().values().size());
  for (std::size_t i = 0; i < items.size(); ++i) acc += w(static_cast<Eigen::Index>(i)) * items[i].values();
  return SrsfFunction(items.front().grid(), std::move(acc), 0.0, site);
}

PsiFunction weighted_psi(const std::vector<PsiFunction>& psis, const Vector& w) {
  Vector acc = Vector::Zero(psis.front().values().size());
  for (std::size_t i = 0; i < psis.size(); ++i) acc += w(static_cast<Eigen::Index>(i)) * psis[i].values();
  // PsiFunction normalises to unit L2 norm, which is the projection onto the sphere.
  return PsiFunction(psis.front().grid(), acc.cwiseMax(0.0));
}

Matrix sq_extrinsic(const std::vector<PsiFunction>& psis) {
  const Eigen::Index n = static_cast<Eigen::Index>(psis.size());
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double e = extrinsic_distance(psis[i], psis[j]);
      sq(i, j) = sq(j, i) = e * e;
    }
  }
  return sq;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& items, const std::vector<Eigen::Index>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (Eigen::Index i : idx) out.push_back(items[static_cast<std::size_t>(i)]);
  return out;
}

Matrix pick(const Matrix& m, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
  return out;
}

}  // namespace

void KrigingConfig::validate() const {
  if (max_iterations < 1) throw InvalidInput("kriging config: max_iterations must be positive");
  if (!(tolerance > 0.0)) throw InvalidInput("kriging config: tolerance must be positive");
  if (!(weight_floor > 0.0)) throw InvalidInput("kriging config: weight_floor must be positive");
  if (lambda_grid.empty()) throw InvalidInput("kriging config: empty lambda grid");
  for (double l : lambda_grid)
    if (l < 0.0) throw InvalidInput("kriging config: negative lambda");
  if (cv_folds < 2 || cv_repeats < 1) throw InvalidInput("kriging config: bad cross-validation settings");
  if (std::find(omega_candidates.begin(), omega_candidates.end(), 0.0) == omega_candidates.end()) {
    throw InvalidInput("kriging config: omega candidates must include 0");
  }
  for (double w : omega_candidates)
    if (!(w >= 0.0)) throw InvalidInput("kriging config: negative omega candidate");
}

WeightSolution solve_sum_one_weights(const Matrix& v) {
  const Eigen::Index n = v.rows();
  if (n == 0 || v.cols() != n) throw InvalidInput("solve_sum_one_weights: matrix must be square and non-empty");
  WeightSolution out;
  if (n == 1) {
    out.weights = Vector::Ones(1);
    return out;
  }
  const Matrix sym = 0.5 * (v + v.transpose());
  Vector w;
  if (!solve_kkt(sym, Vector::Zero(n), 1.0, w)) {
    out.regularized = true;
    Matrix jittered = sym;
    jittered.diagonal().array() += jitter_for(sym);
    if (!solve_kkt(jittered, Vector::Zero(n), 1.0, w)) throw DegenerateInput("kriging system is singular");
  }
  out.weights = w / w.sum();
  return out;
}

WeightSolution solve_positive_weights(const Matrix& v, double floor) {
  const Eigen::Index n = v.rows();
  if (!(floor > 0.0) || floor * static_cast<double>(n) >= 1.0) {
    throw InvalidInput("solve_positive_weights: floor must lie in (0, 1/n)");
  }
  WeightSolution out = solve_sum_one_weights(v);
  if (n == 1) return out;
  const Matrix sym = 0.5 * (v + v.transpose());
  std::vector<bool> clamped(static_cast<std::size_t>(n), false);
  Vector w = out.weights;

  for (Eigen::Index round = 0; round < n; ++round) {
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!clamped[i] && w(i) < floor) {
        clamped[i] = true;
        any = true;
      }
    }
    if (!any) break;
    std::vector<Eigen::Index> free_idx, fixed_idx;
    for (Eigen::Index i = 0; i < n; ++i) (clamped[i] ? fixed_idx : free_idx).push_back(i);
    if (free_idx.empty()) {
      out.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
      out.fallback_uniform = true;
      return out;
    }
    const Matrix vff = pick(sym, free_idx, free_idx);
    const Matrix vfc = pick(sym, free_idx, fixed_idx);
    const Vector rhs = -2.0 * floor * vfc.rowwise().sum();
    const double total = 1.0 - floor * static_cast<double>(fixed_idx.size());
    Vector wf;
    if (!solve_kkt(vff, rhs, total, wf)) {
      Matrix jittered = vff;
      jittered.diagonal().array() += jitter_for(vff);
      out.regularized = true;
      if (!solve_kkt(jittered, rhs, total, wf)) throw DegenerateInput("positive kriging system is singular");
    }
    for (std::size_t k = 0; k < fixed_idx.size(); ++k) w(fixed_idx[k]) = floor;
    for (std::size_t k = 0; k < free_idx.size(); ++k) w(free_idx[k]) = wf(static_cast<Eigen::Index>(k));
  }
  if ((w.array() < floor).any()) {
    out.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
    out.fallback_uniform = true;
    return out;
  }
  out.weights = w / w.sum();
  return out;
}

Matrix kriging_matrix(const VariogramModel& model, const Matrix& pair_distances, const Vector& target_distances) {
  const Eigen::Index n = pair_distances.rows();
  if (pair_distances.cols() != n || target_distances.size() != n) throw InvalidInput("kriging_matrix: size mismatch");
  Vector v0(n);
  for (Eigen::Index i = 0; i < n; ++i) v0(i) = model(target_distances(i));
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v0(j) + v0(i) - (i == j ? model(0.0) : model(pair_distances(i, j)));
  return m;
}

VariogramModel fit_or_fallback(const EmpiricalVariogram& emp, const Matrix& pair_distances) {
  if (emp.bins.size() >= 3) return fit_matern(emp);
  VariogramModel m;
  double mean = 0.0;
  int count = 0;
  for (const auto& b : emp.bins) {
    mean += b.semivariance * b.pair_count;
    count += b.pair_count;
  }
  m.scale = count > 0 ? mean / count : 0.0;
  const double dmax = pair_distances.size() > 0 ? pair_distances.maxCoeff() : 0.0;
  m.range = dmax > 0.0 ? dmax : 1.0;
  m.degenerate = !(m.scale > 0.0);
  return m;
}

WeightSolution ordinary_weights(const Matrix& pair_distances, const Vector& target_distances,
                                const Matrix& sq_value_distances, const BinConfig& binning,
                                VariogramModel* model_out, EmpiricalVariogram* empirical_out) {
  const Eigen::Index n = pair_distances.rows();
  if (n == 1) {
    if (model_out) *model_out = VariogramModel{};
    if (empirical_out) *empirical_out = EmpiricalVariogram{};
    return WeightSolution{Vector::Ones(1), false, false};
  }
  EmpiricalVariogram emp = empirical_variogram(pair_distances, sq_value_distances, binning);
  const VariogramModel model = fit_or_fallback(emp, pair_distances);
  if (model_out) *model_out = model;
  if (empirical_out) *empirical_out = std::move(emp);
  return solve_sum_one_weights(kriging_matrix(model, pair_distances, target_distances));
}

double symmetric_shape_distance(const SrsfFunction& a, const SrsfFunction& b) {
  return 0.5 * (shape_distance(a, b) + shape_distance(b, a));
}

double ShapeDistanceCache::get(const std::string& id_a, const SrsfFunction& a, const std::string& id_b,
                               const SrsfFunction& b) {
  const auto key = id_a < id_b ? std::make_pair(id_a, id_b) : std::make_pair(id_b, id_a);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double d = symmetric_shape_distance(a, b);
  std::lock_guard<std::mutex> lock(mutex_);
  values_.emplace(key, d);
  return d;
}

std::size_t ShapeDistanceCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return values_.size();
}

AmplitudeKrigingResult amplitude_krige(const std::vector<SrsfFunction>& qs, const std::vector<Site>& sites,
                                       const Site& target, const KrigingConfig& config) {
  const std::size_t n = qs.size();
  if (n == 0 || sites.size() != n) throw InsufficientData("amplitude_krige: need observations with sites");
  const Grid& grid = qs.front().grid();

  if (n == 1) {
    return AmplitudeKrigingResult{SrsfFunction(grid, qs[0].values(), 0.0, target),
                                  Vector::Ones(1),
                                  {WarpingFunction::identity(grid)},
                                  VariogramModel{},
                                  EmpiricalVariogram{},
                                  0,
                                  true,
                                  0.0,
                                  false};
  }

  const Matrix pair_d = site_distance_matrix(sites);
  const Vector target_d = distances_to(sites, target);
  Eigen::Index nearest = 0;
  for (Eigen::Index i = 1; i < target_d.size(); ++i)
    if (target_d(i) < target_d(nearest)) nearest = i;

  SrsfFunction templ(grid, qs[static_cast<std::size_t>(nearest)].values(), 0.0, target);
  AmplitudeKrigingResult out{templ, Vector::Zero(static_cast<Eigen::Index>(n)), {}, {}, {}, 0, false, 0.0, false};

  for (int k = 1; k <= config.max_iterations; ++k) {
    std::vector<SrsfFunction> aligned;
    std::vector<WarpingFunction> warps;
    std::vector<Vector> values;
    aligned.reserve(n);
    for (const auto& q : qs) {
      AlignmentResult a = dp_align(templ, q, config.align);
      values.push_back(a.aligned.values());
      warps.push_back(std::move(a.warp));
      aligned.push_back(std::move(a.aligned));
    }
    VariogramModel model;
    EmpiricalVariogram emp;
    const WeightSolution ws =
        ordinary_weights(pair_d, target_d, pairwise_sq_l2(grid, values), config.binning, &model, &emp);
    SrsfFunction next = weighted_sum(aligned, ws.weights, target);
    const double change = norm(grid, next.values() - templ.values());

    out.amplitude = next;
    out.weights = ws.weights;
    out.phases = std::move(warps);
    out.model = model;
    out.empirical = std::move(emp);
    out.iterations = k;
    out.last_change = change;
    out.regularized = out.regularized || ws.regularized;
    templ = std::move(next);
    if (change < config.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

AmplitudeKrigingResult amplitude_krige(const SpatialDataset& dataset, const Site& target,
                                       const KrigingConfig& config) {
  return amplitude_krige(dataset.srsfs(), dataset.sites(), target, config);
}

PhaseKrigingResult phase_krige(const std::vector<PsiFunction>& psis, const Matrix& pair_distances,
                               const Vector& target_distances, const KrigingConfig& config) {
  const Eigen::Index n = static_cast<Eigen::Index>(psis.size());
  if (n == 0) throw InsufficientData("phase_krige: no phases");
  if (n == 1) {
    return PhaseKrigingResult{psi_to_warp(psis[0]), psis[0], Vector::Ones(1), {}, {}, false};
  }
  EmpiricalVariogram emp = empirical_variogram(pair_distances, sq_extrinsic(psis), config.binning);
  const VariogramModel model = fit_or_fallback(emp, pair_distances);
  const double floor = std::min(config.weight_floor, 0.5 / static_cast<double>(n));
  const WeightSolution ws = solve_positive_weights(kriging_matrix(model, pair_distances, target_distances), floor);
  PsiFunction psi = weighted_psi(psis, ws.weights);
  WarpingFunction phase = psi_to_warp(psi);
  return PhaseKrigingResult{std::move(phase), std::move(psi), ws.weights, model, std::move(emp), ws.fallback_uniform};
}

PhaseKrigingResult phase_krige(const std::vector<PsiFunction>& psis, const std::vector<EnlargedPoint>& points,
                               const EnlargedPoint& target, double omega, const KrigingConfig& config) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  if (static_cast<Eigen::Index>(psis.size()) != n) throw InvalidInput("phase_krige: phases and points disagree");
  Matrix pair_d = Matrix::Zero(n, n);
  Vector target_d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s0 = (points[i].site - target.site).squaredNorm();
    const double d0 = omega > 0.0 ? symmetric_shape_distance(points[i].shape, target.shape) : 0.0;
    target_d(i) = std::sqrt(s0 + omega * d0 * d0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = (points[i].site - points[j].site).squaredNorm();
      const double d = omega > 0.0 ? symmetric_shape_distance(points[i].shape, points[j].shape) : 0.0;
      pair_d(i, j) = pair_d(j, i) = std::sqrt(s + omega * d * d);
    }
  }
  return phase_krige(psis, pair_d, target_d, config);
}

PhaseStageResult krige_phase_stage(const std::vector<SrsfFunction>& qs, const std::vector<std::string>& ids,
                                   const std::vector<Site>& sites, const SrsfFunction& amplitude,
                                   const Site& target, const KrigingConfig& config, ShapeDistanceCache* cache) {
  const Eigen::Index n = static_cast<Eigen::Index>(qs.size());
  if (n == 0 || ids.size() != qs.size() || sites.size() != qs.size()) {
    throw InvalidInput("krige_phase_stage: observations, ids and sites disagree");
  }
  const Grid& grid = amplitude.grid();
  PhaseStageResult out{PhaseKrigingResult{WarpingFunction::identity(grid), PsiFunction::identity(grid),
                                          Vector::Ones(1), {}, {}, false},
                       0.0, config.lambda_grid.front(), {}, {}};

  auto phases_for = [&](double lambda) {
    std::vector<PsiFunction> psis;
    psis.reserve(qs.size());
    for (const auto& q : qs) psis.push_back(warp_to_psi(penalized_align(amplitude, q, lambda, config.align).warp));
    return psis;
  };

  if (n == 1) {
    out.psis = phases_for(out.lambda);
    out.kriging = phase_krige(out.psis, Matrix::Zero(1, 1), Vector::Zero(1), config);
    return out;
  }

  const Matrix site_d = site_distance_matrix(sites);
  const Vector target_site_d = distances_to(sites, target);
  Matrix shape_d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      shape_d(i, j) = shape_d(j, i) = cache ? cache->get(ids[i], qs[i], ids[j], qs[j])
                                            : symmetric_shape_distance(qs[i], qs[j]);
    }
  }
  Vector target_shape_d(n);
  for (Eigen::Index i = 0; i < n; ++i) target_shape_d(i) = symmetric_shape_distance(amplitude, qs[i]);

  // Candidate lambdas: phases, omega and repeated k-fold loss on extrinsic distance.
  std::vector<std::vector<PsiFunction>> psis_by_lambda;
  std::vector<double> omega_by_lambda;
  for (double lambda : config.lambda_grid) {
    psis_by_lambda.push_back(phases_for(lambda));
    const Matrix sq = sq_extrinsic(psis_by_lambda.back());
    omega_by_lambda.push_back(select_omega(site_d, shape_d, sq, config.omega_candidates, config.binning).omega);
  }

  std::size_t best = 0;
  if (config.lambda_grid.size() > 1 && n >= 3) {
    const int folds = static_cast<int>(std::min<Eigen::Index>(config.cv_folds, n));
    std::vector<std::vector<Eigen::Index>> splits;  // fold membership per repeat, shared across lambdas
    for (int rep = 0; rep < config.cv_repeats; ++rep) {
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(rep), 0x5eedu};
      std::mt19937_64 rng(seq);
      std::shuffle(perm.begin(), perm.end(), rng);
      splits.push_back(std::move(perm));
    }
    for (std::size_t l = 0; l < config.lambda_grid.size(); ++l) {
      const auto& psis = psis_by_lambda[l];
      const Matrix dist = enlarged_distance_matrix(site_d, shape_d, omega_by_lambda[l]);
      double loss = 0.0;
      int count = 0;
      for (const auto& perm : splits) {
        for (int f = 0; f < folds; ++f) {
          std::vector<Eigen::Index> held, train;
          for (Eigen::Index m = 0; m < n; ++m) (m % folds == f ? held : train).push_back(perm[m]);
          if (train.size() < 2) continue;
          const Matrix train_d = pick(dist, train, train);
          const std::vector<PsiFunction> train_psis = pick(psis, train);
          for (Eigen::Index j : held) {
            Vector td(static_cast<Eigen::Index>(train.size()));
            for (std::size_t t = 0; t < train.size(); ++t) td(static_cast<Eigen::Index>(t)) = dist(train[t], j);
            const PhaseKrigingResult pred = phase_krige(train_psis, train_d, td, config);
            const double e = extrinsic_distance(pred.psi, psis[static_cast<std::size_t>(j)]);
            loss += e * e;
            ++count;
          }
        }
      }
      out.lambda_losses.push_back(count > 0 ? loss / count : std::numeric_limits<double>::infinity());
    }
    for (std::size_t l = 1; l < out.lambda_losses.size(); ++l)
      if (out.lambda_losses[l] < out.lambda_losses[best]) best = l;
  }

  out.lambda = config.lambda_grid[best];
  out.omega = omega_by_lambda[best];
  out.psis = std::move(psis_by_lambda[best]);
  const Matrix dist = enlarged_distance_matrix(site_d, shape_d, out.omega);
  const Vector target_d =
      (target_site_d.array().square() + out.omega * target_shape_d.array().square()).sqrt().matrix();
  out.kriging = phase_krige(out.psis, dist, target_d, config);
  return out;
}

double translation_krige(const std::vector<double>& starts, const std::vector<Site>& sites, const Site& target,
                         const BinConfig& binning) {
  const Eigen::Index n = static_cast<Eigen::Index>(starts.size());
  if (n == 0 || sites.size() != starts.size()) throw InsufficientData("translation_krige: no observations");
  const auto [lo, hi] = std::minmax_element(starts.begin(), starts.end());
  if (*lo == *hi) return *lo;
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sq(i, j) = sq(j, i) = (starts[i] - starts[j]) * (starts[i] - starts[j]);
  const WeightSolution ws = ordinary_weights(site_distance_matrix(sites), distances_to(sites, target), sq, binning);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += ws.weights(i) * starts[static_cast<std::size_t>(i)];
  return acc;
}

SampledFunction combine_prediction(const SrsfFunction& amplitude, const WarpingFunction& phase, double translation,
                                   const Site& target) {
  const SrsfFunction warped = group_action(amplitude, warp_invert(phase));
  return srsf_inverse(SrsfFunction(amplitude.grid(), warped.values(), translation, target));
}

KrigingResult amplitude_phase_krige(const SpatialDataset& dataset, const Site& target, const KrigingConfig& config,
                                    ShapeDistanceCache* cache) {
  config.validate();
  if (dataset.size() == 0) throw InsufficientData("amplitude_phase_krige: empty dataset");
  const std::vector<SrsfFunction> qs = dataset.srsfs();
  const std::vector<Site> sites = dataset.sites();
  const Grid& grid = dataset.grid;

  if (dataset.size() == 1) {
    const SampledFunction& f = dataset.functions.front();
    SrsfFunction amp(grid, qs[0].values(), 0.0, target);
    return KrigingResult{amp,  WarpingFunction::identity(grid), f.values()(0),
                         SampledFunction(grid, f.values(), target), Vector::Ones(1), Vector::Ones(1),
                         0,    true, 0.0, config.lambda_grid.front(), {}, {}, {}, {}};
  }

  AmplitudeKrigingResult amp = amplitude_krige(qs, sites, target, config);
  PhaseStageResult phase = krige_phase_stage(qs, dataset.ids, sites, amp.amplitude, target, config, cache);
  std::vector<double> starts;
  for (const auto& f : dataset.functions) starts.push_back(f.values()(0));
  const double translation = translation_krige(starts, sites, target, config.binning);
  SampledFunction combined = combine_prediction(amp.amplitude, phase.kriging.phase, translation, target);
  return KrigingResult{amp.amplitude,  phase.kriging.phase, translation,      std::move(combined),
                       amp.weights,    phase.kriging.weights, amp.iterations, amp.converged,
                       phase.omega,    phase.lambda,          amp.model,      phase.kriging.model,
                       amp.empirical,  phase.kriging.empirical};
}

SampledFunction ordinary_krige_functional(const SpatialDataset& dataset, const Site& target, const BinConfig& binning,
                                          Vector* weights_out, VariogramModel* model_out,
                                          EmpiricalVariogram* empirical_out) {
  const std::size_t n = dataset.size();
  if (n == 0) throw InsufficientData("ordinary_krige_functional: empty dataset");
  std::vector<Vector> values;
  for (const auto& f : dataset.functions) values.push_back(f.values());
  const std::vector<Site> sites = dataset.sites();
  const WeightSolution ws = ordinary_weights(site_distance_matrix(sites), distances_to(sites, target),
                                             pairwise_sq_l2(dataset.grid, values), binning, model_out,
                                             empirical_out);
  Vector acc = Vector::Zero(dataset.grid.size());
  for (std::size_t i = 0; i < n; ++i) acc += ws.weights(static_cast<Eigen::Index>(i)) * values[i];
  if (weights_out) *weights_out = ws.weights;
  return SampledFunction(dataset.grid, std::move(acc), target);
}

}  // namespace apsf
