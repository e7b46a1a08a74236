#include <apsf/fdcore.hpp>
#include <apsf/numerics.hpp>

#include <cmath>
#include <string>

namespace apsf {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidInput(std::string(what) + ": arguments live on different grids");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite value");
}

}  // namespace

Grid::Grid(Eigen::Index size) {
  if (size < 2) throw InvalidInput("grid needs at least two points");
  auto pts = std::make_shared<Vector>(size);
  const double h = 1.0 / static_cast<double>(size - 1);
  for (Eigen::Index m = 0; m < size; ++m) (*pts)(m) = static_cast<double>(m) * h;
  (*pts)(size - 1) = 1.0;
  points_ = std::move(pts);
}

double inner(const Grid& grid, const Vector& a, const Vector& b) {
  return numerics::trapezoid(a.cwiseProduct(b), grid.spacing());
}

double norm(const Grid& grid, const Vector& a) { return std::sqrt(std::max(0.0, inner(grid, a, a))); }

SampledFunction::SampledFunction(Grid grid, Vector values, Site site)
    : grid_(std::move(grid)), values_(std::move(values)), site_(std::move(site)) {
  if (values_.size() != grid_.size()) throw InvalidInput("sampled function: length does not match grid");
  require_finite(values_, "sampled function");
}

double SampledFunction::operator()(double t) const { return numerics::interpolate(values_, grid_.spacing(), t); }

SrsfFunction::SrsfFunction(Grid grid, Vector values, double start, Site site)
    : grid_(std::move(grid)), values_(std::move(values)), start_(start), site_(std::move(site)) {
  if (values_.size() != grid_.size()) throw InvalidInput("srsf: length does not match grid");
  require_finite(values_, "srsf");
  if (!std::isfinite(start_)) throw InvalidInput("srsf: non-finite start value");
}

WarpingFunction::WarpingFunction(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
  const Eigen::Index n = grid_.size();
  if (values_.size() != n) throw InvalidWarp("warp: length does not match grid");
  if (!values_.allFinite()) throw InvalidWarp("warp: non-finite value");
  if (std::abs(values_(0)) > 1e-12 || std::abs(values_(n - 1) - 1.0) > 1e-12) {
    throw InvalidWarp("warp: must map 0 to 0 and 1 to 1");
  }
  values_(0) = 0.0;
  values_(n - 1) = 1.0;
  for (Eigen::Index m = 1; m < n; ++m) {
    if (!(values_(m) > values_(m - 1))) {
      throw InvalidWarp("warp: not strictly increasing at node " + std::to_string(m));
    }
  }
}

WarpingFunction WarpingFunction::identity(const Grid& grid) { return WarpingFunction(grid, grid.points()); }

PsiFunction::PsiFunction(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InvalidInput("psi: length does not match grid");
  require_finite(values_, "psi");
  if ((values_.array() < 0.0).any()) throw InvalidInput("psi: negative value");
  const double nrm = apsf::norm(grid_, values_);
  if (!(nrm > 0.0)) throw DegenerateInput("psi: zero norm");
  if (std::abs(nrm - 1.0) > 1e-6) values_ /= nrm;
}

PsiFunction PsiFunction::identity(const Grid& grid) {
  return PsiFunction(grid, Vector::Ones(grid.size()));
}

SrsfFunction srsf_transform(const SampledFunction& f) {
  const Vector d = numerics::gradient(f.values(), f.grid().spacing());
  if (!d.allFinite()) throw InvalidInput("srsf_transform: non-finite derivative");
  Vector q(d.size());
  for (Eigen::Index m = 0; m < d.size(); ++m) {
    const double v = d(m);
    q(m) = v > 0.0 ? std::sqrt(v) : (v < 0.0 ? -std::sqrt(-v) : 0.0);
  }
  return SrsfFunction(f.grid(), std::move(q), f.values()(0), f.site());
}

SampledFunction srsf_inverse(const SrsfFunction& q) {
  const Vector slope = q.values().cwiseProduct(q.values().cwiseAbs());
  Vector f = numerics::cumulative_trapezoid(slope, q.grid().spacing());
  f.array() += q.start();
  return SampledFunction(q.grid(), std::move(f), q.site());
}

SrsfFunction group_action(const SrsfFunction& q, const WarpingFunction& g) {
  require_same_grid(q.grid(), g.grid(), "group_action");
  const double h = q.grid().spacing();
  const Vector gdot = numerics::gradient(g.values(), h);
  Vector out(q.values().size());
  for (Eigen::Index m = 0; m < out.size(); ++m) {
    if (!(gdot(m) > 0.0)) throw InvalidWarp("group_action: warp is not increasing");
    out(m) = numerics::interpolate(q.values(), h, g.values()(m)) * std::sqrt(gdot(m));
  }
  return SrsfFunction(q.grid(), std::move(out), q.start(), q.site());
}

WarpingFunction warp_compose(const WarpingFunction& g1, const WarpingFunction& g2) {
  require_same_grid(g1.grid(), g2.grid(), "warp_compose");
  const double h = g1.grid().spacing();
  Vector out(g2.values().size());
  for (Eigen::Index m = 0; m < out.size(); ++m) out(m) = numerics::interpolate(g1.values(), h, g2.values()(m));
  return WarpingFunction(g1.grid(), std::move(out));
}

WarpingFunction warp_invert(const WarpingFunction& g) {
  const Grid& grid = g.grid();
  const Vector& x = g.values();
  const Vector& t = grid.points();
  const Eigen::Index n = grid.size();
  Vector out(n);
  out(0) = 0.0;
  out(n - 1) = 1.0;
  // Walk both increasing sequences once: find the segment of g containing t_m.
  Eigen::Index seg = 0;
  for (Eigen::Index m = 1; m + 1 < n; ++m) {
    while (seg + 1 < n - 1 && x(seg + 1) <= t(m)) ++seg;
    const double w = (t(m) - x(seg)) / (x(seg + 1) - x(seg));
    out(m) = t(seg) + w * (t(seg + 1) - t(seg));
  }
  return WarpingFunction(grid, std::move(out));
}

PsiFunction warp_to_psi(const WarpingFunction& g) {
  const Vector gdot = numerics::gradient(g.values(), g.grid().spacing());
  Vector psi = gdot.cwiseMax(0.0).cwiseSqrt();
  const double nrm = norm(g.grid(), psi);
  psi /= nrm;
  return PsiFunction(g.grid(), std::move(psi));
}

WarpingFunction psi_to_warp(const PsiFunction& p) {
  Vector gamma = numerics::cumulative_trapezoid(p.values().cwiseAbs2(), p.grid().spacing());
  const double total = gamma(gamma.size() - 1);
  if (!(total > 0.0)) throw InvalidWarp("psi_to_warp: psi integrates to zero");
  gamma /= total;
  gamma(gamma.size() - 1) = 1.0;
  return WarpingFunction(p.grid(), std::move(gamma));
}

SampledFunction compose(const SampledFunction& f, const WarpingFunction& g) {
  require_same_grid(f.grid(), g.grid(), "compose");
  const double h = f.grid().spacing();
  Vector out(g.values().size());
  for (Eigen::Index m = 0; m < out.size(); ++m) out(m) = numerics::interpolate(f.values(), h, g.values()(m));
  return SampledFunction(f.grid(), std::move(out), f.site());
}

Vector derivative(const SampledFunction& f) { return numerics::gradient(f.values(), f.grid().spacing()); }

}  // namespace apsf
