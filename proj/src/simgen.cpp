#include <apsf/simgen.hpp>
#include <apsf/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace apsf {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector standard_normals(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<Site> square_grid(int side, double lo, double hi) {
  std::vector<Site> sites;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double x = side == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * c / (side - 1);
      const double y = side == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * r / (side - 1);
      sites.emplace_back(x, y);
    }
  }
  return sites;
}

// f = g o gamma with g sampled on the grid.
SampledFunction warp_values(const Grid& grid, const Vector& g, const WarpingFunction& gamma, const Site& site) {
  return compose(SampledFunction(grid, g, site), gamma);
}

Partition make_partition(const std::vector<std::string>& ids, const std::vector<int>& cluster) {
  // Relabel by first appearance so partitions compare cleanly with clustering output.
  Partition p;
  p.sites = ids;
  std::vector<int> seen;
  for (int c : cluster) {
    auto it = std::find(seen.begin(), seen.end(), c);
    if (it == seen.end()) {
      seen.push_back(c);
      p.labels.push_back(static_cast<int>(seen.size()));
    } else {
      p.labels.push_back(static_cast<int>(it - seen.begin()) + 1);
    }
  }
  p.k = static_cast<int>(seen.size());
  return p;
}

std::vector<std::string> numbered_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i + 1));
  return ids;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Rng derived_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double matern_covariance(double h, double sigma2, double ell) {
  if (h < 0.0) throw InvalidInput("matern_covariance: negative distance");
  return sigma2 * std::exp(-h / ell);
}

void FieldSpec::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidInput("field: sigma2 must be >= 0");
  if (!(ell > 0.0)) throw InvalidInput("field: ell must be positive");
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (sites[i] == sites[j]) throw InvalidInput("field: duplicate sites");
}

Matrix covariance_matrix(const FieldSpec& spec) {
  const Eigen::Index n = static_cast<Eigen::Index>(spec.sites.size());
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c(i, j) = matern_covariance((spec.sites[i] - spec.sites[j]).norm(), spec.sigma2, spec.ell);
  return c;
}

Vector sample_gaussian_field(const FieldSpec& spec, const Vector& mean) {
  Rng rng = derived_stream(spec.seed, 0);
  return sample_gaussian_field(spec, mean, rng);
}

Vector sample_gaussian_field(const FieldSpec& spec, const Vector& mean, Rng& rng) {
  spec.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(spec.sites.size());
  if (mean.size() != n) throw InvalidInput("sample_gaussian_field: mean has wrong length");
  const Vector z = standard_normals(n, rng);  // drawn even when unused, so streams stay aligned
  if (spec.sigma2 == 0.0) return mean;
  Matrix c = covariance_matrix(spec);
  c.diagonal().array() += 1e-10;
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) throw DegenerateCovariance("covariance matrix is not positive definite");
  return mean + llt.matrixL() * z;
}

Vector correlated_uniform(const FieldSpec& spec, double bound) {
  Rng rng = derived_stream(spec.seed, 0);
  return correlated_uniform(spec, bound, rng);
}

Vector correlated_uniform(const FieldSpec& spec, double bound, Rng& rng) {
  if (!(bound > 0.0)) throw InvalidInput("correlated_uniform: bound must be positive");
  FieldSpec unit = spec;
  unit.sigma2 = 1.0;
  const Vector g = sample_gaussian_field(unit, Vector::Zero(static_cast<Eigen::Index>(spec.sites.size())), rng);
  Vector out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) out(i) = std::clamp(bound * (2.0 * normal_cdf(g(i)) - 1.0), -bound, bound);
  return out;
}

WarpingFunction beta_cdf_warp(const Grid& grid, double b) {
  if (!std::isfinite(b)) throw InvalidInput("beta_cdf_warp: b must be finite");
  const double beta = std::exp(b);
  const Vector& t = grid.points();
  Vector g(t.size());
  for (Eigen::Index m = 0; m < t.size(); ++m) g(m) = 1.0 - std::pow(1.0 - t(m), beta);
  g(0) = 0.0;
  g(g.size() - 1) = 1.0;
  bool increasing = true;
  for (Eigen::Index m = 1; m < g.size(); ++m) increasing = increasing && g(m) > g(m - 1);
  if (!increasing) {
    // Saturated in floating point (very large or small exp(b)): nudge towards the identity.
    g = (1.0 - 1e-9) * g + 1e-9 * t;
    g(g.size() - 1) = 1.0;
  }
  return WarpingFunction(grid, std::move(g));
}

Matrix bspline_basis(const Grid& grid, int count) {
  constexpr int degree = 3;
  if (count < degree + 1) throw InvalidInput("bspline_basis: need at least four functions");
  const int interior = count - degree - 1;
  std::vector<double> knots;
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);

  const Vector& t = grid.points();
  Matrix basis = Matrix::Zero(t.size(), count);
  const int spans = static_cast<int>(knots.size()) - 1;
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    const double x = t(m);
    // Cox-de Boor recursion, degree 0 upwards; the right end belongs to the last span.
    std::vector<double> n(static_cast<std::size_t>(spans), 0.0);
    for (int i = 0; i < spans; ++i) {
      const bool last = knots[i] < knots[i + 1] && knots[i + 1] == 1.0 && x == 1.0;
      n[i] = ((knots[i] <= x && x < knots[i + 1]) || last) ? 1.0 : 0.0;
    }
    for (int p = 1; p <= degree; ++p) {
      for (int i = 0; i + p < spans; ++i) {
        double v = 0.0;
        const double d1 = knots[i + p] - knots[i];
        const double d2 = knots[i + p + 1] - knots[i + 1];
        if (d1 > 0.0) v += (x - knots[i]) / d1 * n[i];
        if (d2 > 0.0) v += (knots[i + p + 1] - x) / d2 * n[i + 1];
        n[i] = v;
      }
    }
    for (int j = 0; j < count; ++j) basis(m, j) = n[j];
  }
  return basis;
}

KrigingDesign parse_kriging_design(const std::string& name) {
  if (name == "bimodal") return KrigingDesign::bimodal;
  if (name == "bspline") return KrigingDesign::bspline;
  throw InvalidInput("unknown kriging design '" + name + "'");
}

ClusterDesign parse_cluster_design(const std::string& name) {
  if (name == "agree") return ClusterDesign::agree;
  if (name == "disagree") return ClusterDesign::disagree;
  throw InvalidInput("unknown cluster design '" + name + "'");
}

Vector bimodal_shape(const Grid& grid) {
  return (-(4.0 * kPi * grid.points().array()).cos()).matrix();
}

SimDataset gen_kriging_dataset(const KrigingSimSpec& spec) {
  if (!(spec.bound > 0.0) || !(spec.ell1 > 0.0) || !(spec.ell2 > 0.0) || spec.sigma_a2 < 0.0 || spec.noise_sd < 0.0) {
    throw InvalidInput("gen_kriging_dataset: invalid parameters");
  }
  Rng rng = derived_stream(spec.seed, 0);
  const Grid grid(spec.grid_size);

  std::vector<Site> sites;
  if (spec.layout == Layout::grid5x5) {
    sites = square_grid(5, -2.0, 2.0);
  } else if (spec.layout == Layout::uniform_random) {
    if (spec.random_sites < 1) throw InvalidInput("gen_kriging_dataset: random layout needs sites");
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    while (static_cast<int>(sites.size()) < spec.random_sites) {
      const double x = u(rng);
      const double y = u(rng);
      sites.emplace_back(x, y);
    }
  } else {
    throw InvalidInput("gen_kriging_dataset: unknown layout");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());

  Matrix basis;
  Vector coef_mean;
  if (spec.design == KrigingDesign::bspline) {
    basis = bspline_basis(grid, 11);
    coef_mean.resize(11);
    coef_mean << 1, 2, 3, 4, 5, 5, 4, 3, 3, 2, 1;
  } else {
    basis = bimodal_shape(grid);
    coef_mean = Vector::Constant(1, 5.0);
  }

  // Coefficients: one independent spatial field per basis index.
  FieldSpec amp{sites, spec.sigma_a2, spec.ell1, spec.seed};
  Matrix coef(n, basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j)
    coef.col(j) = sample_gaussian_field(amp, Vector::Constant(n, coef_mean(j)), rng);

  FieldSpec phase{sites, 1.0, spec.ell2, spec.seed};
  const Vector b = correlated_uniform(phase, spec.bound, rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  SimDataset out;
  out.dataset.grid = grid;
  out.dataset.ids = numbered_ids(sites.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector g = basis * coef.row(i).transpose();
    for (Eigen::Index m = 0; m < g.size(); ++m) g(m) += spec.noise_sd * noise(rng);
    WarpingFunction gamma = beta_cdf_warp(grid, b(i));
    out.dataset.functions.push_back(warp_values(grid, g, gamma, sites[i]));
    out.true_amplitudes.emplace_back(grid, std::move(g), sites[i]);
    out.true_phases.push_back(std::move(gamma));
  }
  out.dataset.meta.push_back("design=" + std::string(spec.design == KrigingDesign::bimodal ? "bimodal" : "bspline"));
  out.dataset.meta.push_back("seed=" + std::to_string(spec.seed));
  return out;
}

SimDataset gen_cluster_dataset(const ClusterSimSpec& spec) {
  if (!(spec.bound > 0.0) || !(spec.ell > 0.0) || spec.sigma_a2 < 0.0 || spec.noise_sd < 0.0) {
    throw InvalidInput("gen_cluster_dataset: invalid parameters");
  }
  Rng rng = derived_stream(spec.seed, 1);
  const Grid grid(spec.grid_size);

  std::vector<Site> sites;
  std::vector<int> amp_cluster, phase_cluster;
  auto quadrant = [](const Site& s) { return 1 + (s.x() >= 2.0 ? 1 : 0) + (s.y() >= 2.0 ? 2 : 0); };
  auto diagonal = [](const Site& s) {
    const bool below_main = s.y() < s.x();
    const bool below_anti = s.y() < 4.0 - s.x();
    if (below_main && below_anti) return 1;  // bottom
    if (below_main) return 2;                // right
    if (!below_anti) return 3;               // top
    return 4;                                // left
  };
  if (spec.design == ClusterDesign::agree) {
    sites = square_grid(4, 0.5, 3.5);
    for (const auto& s : sites) {
      amp_cluster.push_back(quadrant(s));
      phase_cluster.push_back(quadrant(s));
    }
  } else {
    std::uniform_real_distribution<double> u(0.0, 4.0);
    while (sites.size() < 30) {
      const double x = u(rng);
      const double y = u(rng);
      sites.emplace_back(x, y);
    }
    for (const auto& s : sites) {
      amp_cluster.push_back(quadrant(s));
      phase_cluster.push_back(diagonal(s));
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());

  FieldSpec field{sites, spec.sigma_a2, spec.ell, spec.seed};
  const Vector eps_a = sample_gaussian_field(field, Vector::Constant(n, 5.0), rng);
  FieldSpec unit{sites, 1.0, spec.ell, spec.seed};
  const Vector eps_b = correlated_uniform(unit, spec.bound, rng);
  const Vector mu = (-(2.0 * kPi * grid.points().array()).cos()).matrix();

  std::normal_distribution<double> noise(0.0, 1.0);
  SimDataset out;
  out.dataset.grid = grid;
  out.dataset.ids = numbered_ids(sites.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = amp_cluster[i] * spec.delta_a + eps_a(i);
    const double b = phase_cluster[i] * spec.delta_b + eps_b(i);
    Vector g = a * mu;
    for (Eigen::Index m = 0; m < g.size(); ++m) g(m) += spec.noise_sd * noise(rng);
    WarpingFunction gamma = beta_cdf_warp(grid, b);
    out.dataset.functions.push_back(warp_values(grid, g, gamma, sites[i]));
    out.true_amplitudes.emplace_back(grid, std::move(g), sites[i]);
    out.true_phases.push_back(std::move(gamma));
  }
  out.amplitude_partition = make_partition(out.dataset.ids, amp_cluster);
  out.phase_partition = make_partition(out.dataset.ids, phase_cluster);
  out.dataset.meta.push_back(std::string("design=") + (spec.design == ClusterDesign::agree ? "agree" : "disagree"));
  out.dataset.meta.push_back("seed=" + std::to_string(spec.seed));
  return out;
}

ScaleSim gen_scale_dataset(const ScaleSimSpec& spec, const Site& target) {
  if (spec.grid_side < 1) throw InvalidInput("gen_scale_dataset: grid side must be positive");
  Rng rng = derived_stream(spec.seed, 2);
  const Grid grid(spec.grid_size);
  std::vector<Site> sites = square_grid(spec.grid_side, -2.0, 2.0);
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  std::vector<Site> all = sites;
  all.push_back(target);

  FieldSpec field{all, spec.log_scale_sigma2, spec.ell, spec.seed};
  const Vector log_c = sample_gaussian_field(field, Vector::Zero(n + 1), rng);
  FieldSpec unit{sites, 1.0, spec.ell, spec.seed};
  const Vector b = correlated_uniform(unit, spec.bound, rng);

  const SrsfFunction mu_q = srsf_transform(SampledFunction(grid, bimodal_shape(grid)));
  ScaleSim out{SimDataset{}, mu_q.values(),
               SrsfFunction(grid, std::exp(log_c(n)) * mu_q.values(), 0.0, target)};
  out.sim.dataset.grid = grid;
  out.sim.dataset.ids = numbered_ids(sites.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const SampledFunction base = srsf_inverse(SrsfFunction(grid, std::exp(log_c(i)) * mu_q.values(), 0.0, sites[i]));
    WarpingFunction gamma = beta_cdf_warp(grid, b(i));
    out.sim.dataset.functions.push_back(compose(base, gamma));
    out.sim.true_amplitudes.push_back(base);
    out.sim.true_phases.push_back(std::move(gamma));
  }
  return out;
}

SimDataset gen_confounding_dataset(const ConfoundingSpec& spec) {
  Rng rng = derived_stream(spec.seed, 3);
  const Grid grid(spec.grid_size);
  const std::vector<Site> sites = square_grid(7, 0.0, 6.0);
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  FieldSpec field{sites, spec.sigma_a2, spec.ell, spec.seed};
  const Vector a = sample_gaussian_field(field, Vector::Constant(n, 5.0), rng);
  std::uniform_real_distribution<double> u(-spec.bound, spec.bound);  // no spatial correlation
  const Vector mu = bimodal_shape(grid);

  SimDataset out;
  out.dataset.grid = grid;
  out.dataset.ids = numbered_ids(sites.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector g = a(i) * mu;
    WarpingFunction gamma = beta_cdf_warp(grid, u(rng));
    out.dataset.functions.push_back(warp_values(grid, g, gamma, sites[i]));
    out.true_amplitudes.emplace_back(grid, g, sites[i]);
    out.true_phases.push_back(std::move(gamma));
  }
  return out;
}

SpatialDataset ozone_like_dataset(std::uint64_t seed, Eigen::Index samples) {
  Rng rng = derived_stream(seed, 10);
  const Grid grid(samples);
  std::uniform_real_distribution<double> lon(-123.0, -120.0), lat(35.0, 39.0);
  std::vector<Site> sites;
  while (sites.size() < 24) {
    const double x = lon(rng);
    const double y = lat(rng);
    sites.emplace_back(x, y);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  // Peak level (ppm) and timing both vary smoothly in space.
  FieldSpec amp{sites, 0.006 * 0.006, 1.5, seed};
  const Vector peak = sample_gaussian_field(amp, Vector::Constant(n, 0.03), rng);
  FieldSpec base{sites, 0.003 * 0.003, 1.5, seed};
  const Vector floor = sample_gaussian_field(base, Vector::Constant(n, 0.02), rng);
  FieldSpec phase{sites, 1.0, 1.5, seed};
  const Vector b = correlated_uniform(phase, 0.8, rng);

  const Vector& t = grid.points();
  const Vector hump = (-0.5 * ((t.array() - 0.45) / 0.14).square()).exp().matrix();
  std::normal_distribution<double> noise(0.0, 0.0015);
  SpatialDataset d;
  d.grid = grid;
  for (Eigen::Index i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "oz%02d", static_cast<int>(i + 1));
    d.ids.emplace_back(id);
    Vector g = Vector::Constant(samples, floor(i)) + peak(i) * hump;
    for (Eigen::Index m = 0; m < samples; ++m) g(m) += noise(rng);
    d.functions.push_back(warp_values(grid, g, beta_cdf_warp(grid, b(i)), sites[i]));
  }
  d.meta.push_back("synthetic ozone-like daily maxima, ppm; x = longitude, y = latitude");
  return d;
}

SpatialDataset weather_like_dataset(std::uint64_t seed, Eigen::Index samples) {
  Rng rng = derived_stream(seed, 11);
  const Grid grid(samples);
  std::uniform_real_distribution<double> lon(-120.0, -75.0), lat(30.0, 48.0);
  std::vector<Site> sites;
  while (sites.size() < 35) {
    const double x = lon(rng);
    const double y = lat(rng);
    sites.emplace_back(x, y);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(sites.size());
  FieldSpec amp{sites, 4.0, 8.0, seed};
  const Vector swing = sample_gaussian_field(amp, Vector::Constant(n, 0.0), rng);
  FieldSpec phase{sites, 1.0, 8.0, seed};
  const Vector b = correlated_uniform(phase, 0.5, rng);

  const Vector& t = grid.points();
  const Vector season = (-(2.0 * kPi * t.array()).cos()).matrix();
  std::normal_distribution<double> noise(0.0, 0.8);
  SpatialDataset d;
  d.grid = grid;
  std::vector<double> lats, lons;
  for (Eigen::Index i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "wx%02d", static_cast<int>(i + 1));
    d.ids.emplace_back(id);
    const double la = sites[i].y();
    const double mean = 22.0 - 0.8 * (la - 30.0);
    const double amplitude = 8.0 + 0.35 * (la - 30.0) + swing(i);
    Vector g = Vector::Constant(samples, mean) + amplitude * season;
    for (Eigen::Index m = 0; m < samples; ++m) g(m) += noise(rng);
    d.functions.push_back(warp_values(grid, g, beta_cdf_warp(grid, b(i)), sites[i]));
    lats.push_back(la);
    lons.push_back(sites[i].x());
  }
  d.covariates["latitude"] = lats;
  d.covariates["longitude"] = lons;
  d.meta.push_back("synthetic weather-like daily temperature, degrees C; x = longitude, y = latitude");
  return d;
}

}  // namespace apsf
