#include <apsf/metrics.hpp>
#include <apsf/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace apsf {

namespace {

// A DP step with its interior interpolation stencil precomputed in index units.
struct Stencil {
  int dt;
  int dg;
  double sqrt_slope;
  double penalty;               // (sqrt(slope) - 1)^2 * dt, times h and lambda later
  std::vector<int> offset;      // floor(r * dg / dt) for r = 1..dt-1
  std::vector<double> frac;     // fractional part of r * dg / dt
};

std::vector<Stencil> make_stencils(int max_step) {
  std::vector<Stencil> out;
  for (const DpStep& s : dp_steps(max_step)) {
    Stencil st;
    st.dt = s.dt;
    st.dg = s.dg;
    const double slope = static_cast<double>(s.dg) / static_cast<double>(s.dt);
    st.sqrt_slope = std::sqrt(slope);
    st.penalty = (st.sqrt_slope - 1.0) * (st.sqrt_slope - 1.0) * s.dt;
    for (int r = 1; r < s.dt; ++r) {
      const int num = r * s.dg;
      st.offset.push_back(num / s.dt);
      st.frac.push_back(static_cast<double>(num % s.dt) / static_cast<double>(s.dt));
    }
    out.push_back(std::move(st));
  }
  return out;
}

// Trapezoidal integral (without the factor h) of (q1 - (q2 o g) sqrt(g'))^2 over
// one straight lattice segment starting at node (i0, j0).
inline double segment_cost(const double* q1, const double* q2, int i0, int j0, const Stencil& st) {
  const double d0 = q1[i0] - q2[j0] * st.sqrt_slope;
  const double d1 = q1[i0 + st.dt] - q2[j0 + st.dg] * st.sqrt_slope;
  double sum = 0.5 * (d0 * d0 + d1 * d1);
  for (std::size_t r = 0; r < st.offset.size(); ++r) {
    const int j = j0 + st.offset[r];
    const double f = st.frac[r];
    const double v2 = f == 0.0 ? q2[j] : q2[j] + f * (q2[j + 1] - q2[j]);
    const double d = q1[i0 + 1 + static_cast<int>(r)] - v2 * st.sqrt_slope;
    sum += d * d;
  }
  return sum;
}

Vector warp_from_path(const std::vector<std::pair<int, int>>& path, Eigen::Index n) {
  Vector gamma(n);
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const auto [i0, j0] = path[s];
    const auto [i1, j1] = path[s + 1];
    const double slope = static_cast<double>(j1 - j0) / static_cast<double>(i1 - i0);
    for (int r = 0; r < i1 - i0; ++r) gamma(i0 + r) = (j0 + r * slope) * h;
  }
  gamma(n - 1) = 1.0;
  return gamma;
}

void require_same_grid(const SrsfFunction& a, const SrsfFunction& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("alignment: functions live on different grids");
}

AlignmentResult align_impl(const SrsfFunction& q1, const SrsfFunction& q2, double lambda, int max_step) {
  require_same_grid(q1, q2);
  if (lambda < 0.0 || !std::isfinite(lambda)) throw InvalidInput("alignment: lambda must be >= 0");
  const int n = static_cast<int>(q1.grid().size());
  const double h = q1.grid().spacing();
  const std::vector<Stencil> stencils = make_stencils(max_step);
  const double* a = q1.values().data();
  const double* b = q2.values().data();

  // warped[s][j0 * (dt+1) + r]: sqrt(slope) * q2 interpolated at node r of the
  // segment of stencil s that starts at warp index j0 (endpoints included).
  std::vector<std::vector<double>> warped(stencils.size());
  for (std::size_t s = 0; s < stencils.size(); ++s) {
    const Stencil& st = stencils[s];
    const int stride = st.dt + 1;
    auto& w = warped[s];
    w.assign(static_cast<std::size_t>(std::max(0, n - st.dg)) * stride, 0.0);
    for (int j0 = 0; j0 + st.dg < n; ++j0) {
      double* row = w.data() + static_cast<std::size_t>(j0) * stride;
      row[0] = st.sqrt_slope * b[j0];
      for (std::size_t r = 0; r < st.offset.size(); ++r) {
        const int j = j0 + st.offset[r];
        const double f = st.frac[r];
        row[r + 1] = st.sqrt_slope * (f == 0.0 ? b[j] : b[j] + f * (b[j + 1] - b[j]));
      }
      row[st.dt] = st.sqrt_slope * b[j0 + st.dg];
    }
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  // energy(i, j): best unscaled objective reaching node i (time) / j (warp value).
  std::vector<double> energy(static_cast<std::size_t>(n) * n, inf);
  std::vector<signed char> from(static_cast<std::size_t>(n) * n, -1);
  auto at = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
  energy[at(0, 0)] = 0.0;

  const int last = n - 1;
  for (int i = 1; i < n; ++i) {
    // Cells outside the slope cone from (0,0) or towards (T-1,T-1) are unreachable.
    const int j_lo = std::max({1, (i + max_step - 1) / max_step, last - max_step * (last - i)});
    const int j_hi = std::min({last, max_step * i, last - (last - i + max_step - 1) / max_step});
    for (int j = j_lo; j <= j_hi; ++j) {
      double best = inf;
      signed char arg = -1;
      for (std::size_t s = 0; s < stencils.size(); ++s) {
        const Stencil& st = stencils[s];
        const int k = i - st.dt;
        const int l = j - st.dg;
        if (k < 0 || l < 0) continue;
        double c = energy[at(k, l)];
        if (lambda > 0.0) c += lambda * st.penalty;
        if (!(c < best)) continue;  // segment costs are non-negative
        const double* w = warped[s].data() + static_cast<std::size_t>(l) * (st.dt + 1);
        const double* q = a + k;
        const double d0 = q[0] - w[0];
        const double d1 = q[st.dt] - w[st.dt];
        double seg = 0.5 * (d0 * d0 + d1 * d1);
        for (int r = 1; r < st.dt; ++r) {
          const double d = q[r] - w[r];
          seg += d * d;
        }
        c += seg;
        if (c < best) {
          best = c;
          arg = static_cast<signed char>(s);
        }
      }
      energy[at(i, j)] = best;
      from[at(i, j)] = arg;
    }
  }

  std::vector<std::pair<int, int>> path{{n - 1, n - 1}};
  while (path.back() != std::pair<int, int>{0, 0}) {
    const auto [i, j] = path.back();
    const signed char s = from[at(i, j)];
    if (s < 0) throw Error("dp_align: lattice end point unreachable");
    path.emplace_back(i - stencils[s].dt, j - stencils[s].dg);
  }
  std::reverse(path.begin(), path.end());

  WarpingFunction warp(q1.grid(), warp_from_path(path, n));
  SrsfFunction aligned = group_action(q2, warp);
  const double objective = std::max(0.0, energy[at(n - 1, n - 1)] * h);
  return AlignmentResult{std::move(warp), std::move(aligned), std::sqrt(objective)};
}

}  // namespace

std::vector<DpStep> dp_steps(int max_step) {
  if (max_step < 1) throw InvalidInput("dp_steps: max_step must be positive");
  std::vector<DpStep> steps;
  for (int dt = 1; dt <= max_step; ++dt) {
    for (int dg = 1; dg <= max_step; ++dg) {
      if (std::gcd(dt, dg) == 1) steps.push_back({dt, dg});
    }
  }
  std::stable_sort(steps.begin(), steps.end(), [](const DpStep& x, const DpStep& y) {
    const double ax = std::abs(std::log(static_cast<double>(x.dg) / x.dt));
    const double ay = std::abs(std::log(static_cast<double>(y.dg) / y.dt));
    if (ax != ay) return ax < ay;
    if (x.dt != y.dt) return x.dt < y.dt;
    return x.dg < y.dg;
  });
  return steps;
}

AlignmentResult dp_align(const SrsfFunction& q1, const SrsfFunction& q2, const AlignOptions& options) {
  return align_impl(q1, q2, options.lambda, options.max_step);
}

AlignmentResult penalized_align(const SrsfFunction& q1, const SrsfFunction& q2, double lambda,
                                const AlignOptions& options) {
  return align_impl(q1, q2, lambda, options.max_step);
}

double lattice_path_objective(const SrsfFunction& q1, const SrsfFunction& q2,
                              const std::vector<std::pair<int, int>>& path, double lambda) {
  require_same_grid(q1, q2);
  const int n = static_cast<int>(q1.grid().size());
  if (path.empty() || path.front() != std::pair<int, int>{0, 0} || path.back() != std::pair<int, int>{n - 1, n - 1}) {
    throw InvalidInput("lattice path must run from (0,0) to (T-1,T-1)");
  }
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const int dt = path[s + 1].first - path[s].first;
    const int dg = path[s + 1].second - path[s].second;
    if (dt <= 0 || dg <= 0) throw InvalidInput("lattice path must be strictly increasing");
    Stencil st;
    st.dt = dt;
    st.dg = dg;
    st.sqrt_slope = std::sqrt(static_cast<double>(dg) / dt);
    st.penalty = (st.sqrt_slope - 1.0) * (st.sqrt_slope - 1.0) * dt;
    for (int r = 1; r < dt; ++r) {
      st.offset.push_back(r * dg / dt);
      st.frac.push_back(static_cast<double>(r * dg % dt) / dt);
    }
    total += segment_cost(q1.values().data(), q2.values().data(), path[s].first, path[s].second, st);
    total += lambda * st.penalty;
  }
  return total * q1.grid().spacing();
}

double amplitude_distance(const SrsfFunction& q1, const SrsfFunction& q2) { return dp_align(q1, q2).cost; }

double shape_distance(const SrsfFunction& q1, const SrsfFunction& q2) {
  const double n1 = q1.norm();
  const double n2 = q2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw DegenerateInput("shape_distance: zero-norm function");
  const SrsfFunction u1(q1.grid(), q1.values() / n1, q1.start(), q1.site());
  const SrsfFunction u2(q2.grid(), q2.values() / n2, q2.start(), q2.site());
  return dp_align(u1, u2).cost;
}

PhaseDistances phase_distances(const PsiFunction& psi) {
  const Grid& grid = psi.grid();
  const Vector ones = Vector::Ones(grid.size());
  const double c = std::clamp(inner(grid, psi.values(), ones), -1.0, 1.0);
  return PhaseDistances{std::acos(c), norm(grid, psi.values() - ones)};
}

PhaseDistances phase_distances(const WarpingFunction& relative_phase) {
  return phase_distances(warp_to_psi(relative_phase));
}

PhaseDistances phase_distance(const SrsfFunction& q1, const SrsfFunction& q2) {
  return phase_distances(dp_align(q1, q2).warp);
}

double extrinsic_distance(const PsiFunction& a, const PsiFunction& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("extrinsic_distance: different grids");
  return norm(a.grid(), a.values() - b.values());
}

}  // namespace apsf
