#include <apsf/metrics.hpp>
#include <apsf/variogram.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace apsf {

namespace {

void require_square_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidInput(std::string(what) + ": matrix is not square");
}

struct ProfileFit {
  double scale = 0.0;
  double nugget = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// Best (nugget, scale) for a fixed range; both constrained to be >= 0.
ProfileFit profile(const std::vector<VariogramBin>& bins, double range, bool fit_nugget) {
  const double n = static_cast<double>(bins.size());
  double sg = 0.0, sgg = 0.0, ss = 0.0, ssg = 0.0;
  std::vector<double> g(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) {
    g[b] = bins[b].lag > 0.0 ? -std::expm1(-bins[b].lag / range) : 0.0;
    sg += g[b];
    sgg += g[b] * g[b];
    ss += bins[b].semivariance;
    ssg += bins[b].semivariance * g[b];
  }
  auto sse = [&](double c0, double c1) {
    double acc = 0.0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const double r = bins[b].semivariance - c0 - c1 * g[b];
      acc += r * r;
    }
    return acc;
  };
  auto consider = [&](ProfileFit& best, double c0, double c1) {
    if (c0 < 0.0 || c1 < 0.0) return;
    const double e = sse(c0, c1);
    if (e < best.sse) best = ProfileFit{c1, c0, e};
  };

  ProfileFit best;
  consider(best, 0.0, sgg > 0.0 ? std::max(0.0, ssg / sgg) : 0.0);
  if (fit_nugget) {
    consider(best, std::max(0.0, ss / n), 0.0);
    const double det = n * sgg - sg * sg;
    if (std::abs(det) > 1e-14 * std::max(1.0, n * sgg)) {
      const double c0 = (sgg * ss - sg * ssg) / det;
      const double c1 = (n * ssg - sg * ss) / det;
      consider(best, c0, c1);
    }
  }
  return best;
}

}  // namespace

double VariogramModel::operator()(double h) const {
  if (h <= 0.0) return nugget;
  return nugget + scale * -std::expm1(-h / range);
}

double VariogramModel::signal_fraction() const {
  const double sill = scale + nugget;
  return sill > 0.0 ? scale / sill : 0.0;
}

EmpiricalVariogram empirical_variogram(const Matrix& distances, const Matrix& sq_value_distances,
                                       const BinConfig& binning) {
  require_square_symmetric(distances, "empirical_variogram");
  const Eigen::Index n = distances.rows();
  if (sq_value_distances.rows() != n || sq_value_distances.cols() != n) {
    throw InvalidInput("empirical_variogram: distance and value matrices disagree in size");
  }
  if (n < 2) throw InsufficientData("empirical_variogram: need at least two items");
  if (binning.bins < 1) throw InvalidInput("empirical_variogram: bin count must be positive");

  double max_lag = binning.max_lag;
  if (!(max_lag > 0.0)) {
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) dmax = std::max(dmax, distances(i, j));
    max_lag = 0.5 * dmax;
  }
  const int nb = binning.bins;
  std::vector<double> lag_sum(nb, 0.0), value_sum(nb, 0.0);
  std::vector<int> count(nb, 0);
  const double limit = max_lag * (1.0 + 1e-12);

  if (max_lag > 0.0) {
    const double width = max_lag / nb;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = distances(i, j);
        if (!(d <= limit)) continue;
        const int b = std::min(nb - 1, static_cast<int>(d / width));
        lag_sum[b] += d;
        value_sum[b] += sq_value_distances(i, j);
        ++count[b];
      }
    }
  } else {
    // Every pair sits at lag zero.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        value_sum[0] += sq_value_distances(i, j);
        ++count[0];
      }
    }
  }

  EmpiricalVariogram out;
  for (int b = 0; b < nb; ++b) {
    if (count[b] == 0) continue;
    out.bins.push_back({lag_sum[b] / count[b], 0.5 * value_sum[b] / count[b], count[b]});
  }
  return out;
}

EmpiricalVariogram empirical_variogram(const Matrix& distances, const std::vector<Vector>& values, const Grid& grid,
                                       const BinConfig& binning) {
  const Eigen::Index n = static_cast<Eigen::Index>(values.size());
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vector diff = values[i] - values[j];
      sq(i, j) = sq(j, i) = inner(grid, diff, diff);
    }
  }
  return empirical_variogram(distances, sq, binning);
}

VariogramModel fit_matern(const EmpiricalVariogram& emp, const FitOptions& options) {
  const auto& bins = emp.bins;
  if (bins.size() < 3) throw InsufficientData("fit_matern: need at least three bins");

  double smin = std::numeric_limits<double>::infinity(), smax = -smin, mean = 0.0;
  double lag_min = std::numeric_limits<double>::infinity(), lag_max = 0.0;
  for (const auto& b : bins) {
    smin = std::min(smin, b.semivariance);
    smax = std::max(smax, b.semivariance);
    mean += b.semivariance;
    if (b.lag > 0.0) lag_min = std::min(lag_min, b.lag);
    lag_max = std::max(lag_max, b.lag);
  }
  mean /= static_cast<double>(bins.size());
  double sst = 0.0;
  for (const auto& b : bins) sst += (b.semivariance - mean) * (b.semivariance - mean);

  VariogramModel model;
  model.range = lag_max > 0.0 ? lag_max : 1.0;
  if (smax - smin <= 1e-12 * std::max(std::abs(smax), 1e-300) || !(lag_max > 0.0)) {
    model.degenerate = true;
    model.scale = 0.0;
    model.nugget = options.fit_nugget ? std::max(0.0, mean) : 0.0;
    double sse = 0.0;
    for (const auto& b : bins) sse += (b.semivariance - model.nugget) * (b.semivariance - model.nugget);
    model.fit_error = sse;
    model.r2 = sse <= 1e-300 ? 1.0 : 0.0;
    return model;
  }

  // Profile the linear parameters out and search log(range) only. With a
  // nugget, a range below the first lag is indistinguishable from extra nugget
  // at every binned lag, so the search starts at that lag.
  const double lo = std::log(options.fit_nugget ? lag_min : 0.01 * lag_min);
  const double hi = std::log(100.0 * lag_max);
  constexpr int kGrid = 200;
  std::vector<double> sse(kGrid + 1);
  int best = 0;
  for (int k = 0; k <= kGrid; ++k) {
    const double x = lo + (hi - lo) * k / kGrid;
    sse[k] = profile(bins, std::exp(x), options.fit_nugget).sse;
    if (sse[k] < sse[best]) best = k;
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = profile(bins, std::exp(c), options.fit_nugget).sse;
  double fd = profile(bins, std::exp(d), options.fit_nugget).sse;
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = profile(bins, std::exp(c), options.fit_nugget).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = profile(bins, std::exp(d), options.fit_nugget).sse;
    }
  }
  double best_log_range = 0.5 * (a + b);
  ProfileFit fit = profile(bins, std::exp(best_log_range), options.fit_nugget);
  const double grid_log_range = lo + (hi - lo) * best / kGrid;
  if (sse[best] < fit.sse) {
    best_log_range = grid_log_range;
    fit = profile(bins, std::exp(grid_log_range), options.fit_nugget);
  }

  model.range = std::exp(best_log_range);
  model.scale = fit.scale;
  model.nugget = fit.nugget;
  model.fit_error = fit.sse;
  model.r2 = std::clamp(1.0 - fit.sse / sst, 0.0, 1.0);
  if (model.scale == 0.0) model.degenerate = true;
  return model;
}

Matrix site_distance_matrix(const std::vector<Site>& sites) {
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (sites[i] - sites[j]).norm();
  return d;
}

double enlarged_distance(const Site& s1, const SrsfFunction& shape1, const Site& s2, const SrsfFunction& shape2,
                         double omega) {
  if (omega < 0.0) throw InvalidInput("enlarged_distance: omega must be >= 0");
  const double spatial = (s1 - s2).squaredNorm();
  if (omega == 0.0) return std::sqrt(spatial);
  const double dsh = shape_distance(shape1, shape2);
  return std::sqrt(spatial + omega * dsh * dsh);
}

double enlarged_distance(const EnlargedPoint& y1, const EnlargedPoint& y2, double omega) {
  return enlarged_distance(y1.site, y1.shape, y2.site, y2.shape, omega);
}

Matrix enlarged_distance_matrix(const Matrix& site_distances, const Matrix& shape_distances, double omega) {
  if (site_distances.rows() != shape_distances.rows() || site_distances.cols() != shape_distances.cols()) {
    throw InvalidInput("enlarged_distance_matrix: size mismatch");
  }
  return (site_distances.array().square() + omega * shape_distances.array().square()).sqrt().matrix();
}

Matrix shape_distance_matrix(const std::vector<SrsfFunction>& shapes) {
  const Eigen::Index n = static_cast<Eigen::Index>(shapes.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = 0.5 * (shape_distance(shapes[i], shapes[j]) + shape_distance(shapes[j], shapes[i]));
    }
  }
  return d;
}

std::vector<double> default_omega_candidates() { return {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0}; }

OmegaSelection select_omega(const Matrix& site_distances, const Matrix& shape_distances,
                            const Matrix& sq_value_distances, const std::vector<double>& candidates,
                            const BinConfig& binning) {
  if (std::find(candidates.begin(), candidates.end(), 0.0) == candidates.end()) {
    throw InvalidInput("select_omega: candidates must include 0");
  }
  OmegaSelection out{0.0, {}, {}};
  for (double omega : candidates) {
    if (omega < 0.0) throw InvalidInput("select_omega: negative candidate");
    OmegaCandidate cand{omega, false, {}};
    const Matrix dist = enlarged_distance_matrix(site_distances, shape_distances, omega);
    const EmpiricalVariogram emp = empirical_variogram(dist, sq_value_distances, binning);
    if (emp.bins.size() >= 3) {
      cand.model = fit_matern(emp);
      cand.fitted = true;
    }
    out.candidates.push_back(cand);
  }

  const OmegaCandidate* zero = nullptr;
  const OmegaCandidate* best = nullptr;
  for (const auto& c : out.candidates) {
    if (c.omega == 0.0 && zero == nullptr) zero = &c;
    if (!c.fitted) continue;
    if (best == nullptr || c.model.r2 > best->model.r2 || (c.model.r2 == best->model.r2 && c.omega < best->omega)) {
      best = &c;
    }
  }
  if (best == nullptr) {
    out.omega = 0.0;
    out.model = zero->model;
    return out;
  }
  if (best->omega > 0.0 && zero->fitted && !(best->model.fit_error <= 0.95 * zero->model.fit_error)) {
    best = zero;
  }
  out.omega = best->omega;
  out.model = best->model;
  return out;
}

OmegaSelection select_omega(const std::vector<Site>& sites, const std::vector<SrsfFunction>& shapes,
                            const std::vector<PsiFunction>& psi_values, const std::vector<double>& candidates,
                            const BinConfig& binning) {
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  if (static_cast<Eigen::Index>(shapes.size()) != n || static_cast<Eigen::Index>(psi_values.size()) != n) {
    throw InvalidInput("select_omega: sites, shapes and phases disagree in length");
  }
  Matrix sq = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double e = extrinsic_distance(psi_values[i], psi_values[j]);
      sq(i, j) = sq(j, i) = e * e;
    }
  }
  return select_omega(site_distance_matrix(sites), shape_distance_matrix(shapes), sq, candidates, binning);
}

}  // namespace apsf
