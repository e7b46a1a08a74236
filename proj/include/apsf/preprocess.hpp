#pragma once

#include <apsf/dataset.hpp>

#include <string>
#include <vector>

namespace apsf {

/// Penalised least squares per function: minimises |x - y|^2 + iota |D2 x / h^2|^2,
/// i.e. x = (I + iota/h^4 D2'D2)^{-1} y with D2 the second difference. The
/// frequency response is roughly 1 / (1 + iota w^4). iota = 0 returns the input.
SpatialDataset smooth_dataset(const SpatialDataset& dataset, double iota);

/// Per grid node OLS of the values on (1, covariates...); returns the residual functions.
/// Throws DegenerateInput ("degenerate-covariates") on a rank-deficient design.
SpatialDataset detrend_spatial(const SpatialDataset& dataset, const std::vector<std::string>& covariate_names);

}  // namespace apsf
