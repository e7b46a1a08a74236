#include <apsf/preprocess.hpp>

#include <cmath>

namespace apsf {

SpatialDataset smooth_dataset(const SpatialDataset& dataset, double iota) {
  if (!(iota >= 0.0) || !std::isfinite(iota)) throw InvalidInput("smooth_dataset: iota must be >= 0");
  if (iota == 0.0) return dataset;
  const Eigen::Index n = dataset.grid.size();
  if (n < 3) return dataset;
  const double h = dataset.grid.spacing();
  Matrix d2 = Matrix::Zero(n - 2, n);
  for (Eigen::Index r = 0; r < n - 2; ++r) {
    d2(r, r) = 1.0;
    d2(r, r + 1) = -2.0;
    d2(r, r + 2) = 1.0;
  }
  Matrix system = Matrix::Identity(n, n);
  system.noalias() += (iota / std::pow(h, 4)) * d2.transpose() * d2;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw DegenerateInput("smooth_dataset: smoothing system not positive definite");

  SpatialDataset out = dataset;
  for (auto& f : out.functions) f = SampledFunction(f.grid(), llt.solve(f.values()), f.site());
  return out;
}

SpatialDataset detrend_spatial(const SpatialDataset& dataset, const std::vector<std::string>& covariate_names) {
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  const Eigen::Index p = static_cast<Eigen::Index>(covariate_names.size()) + 1;
  if (n <= p) throw InsufficientData("detrend_spatial: need more sites than covariates + 1");
  Matrix design(n, p);
  design.col(0).setOnes();
  for (Eigen::Index c = 1; c < p; ++c) {
    const auto it = dataset.covariates.find(covariate_names[static_cast<std::size_t>(c - 1)]);
    if (it == dataset.covariates.end()) {
      throw InvalidInput("detrend_spatial: unknown covariate " + covariate_names[static_cast<std::size_t>(c - 1)]);
    }
    if (static_cast<Eigen::Index>(it->second.size()) != n) throw ValidationError("detrend_spatial: covariate length");
    for (Eigen::Index i = 0; i < n; ++i) design(i, c) = it->second[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < p) throw DegenerateInput("degenerate-covariates: design matrix is rank deficient");

  // Column m of `values` holds every site's value at grid node m.
  Matrix values(n, dataset.grid.size());
  for (Eigen::Index i = 0; i < n; ++i) values.row(i) = dataset.functions[i].values().transpose();
  const Matrix coef = qr.solve(values);
  const Matrix residual = values - design * coef;

  SpatialDataset out = dataset;
  for (Eigen::Index i = 0; i < n; ++i)
    out.functions[i] = SampledFunction(dataset.grid, residual.row(i).transpose(), dataset.functions[i].site());
  out.meta.push_back("detrended");
  return out;
}

}  // namespace apsf
