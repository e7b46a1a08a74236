#pragma once

#include <apsf/fdcore.hpp>

#include <map>
#include <string>
#include <vector>

namespace apsf {

/// Sited functions on one grid, with optional per-site covariates.
struct SpatialDataset {
  Grid grid{101};
  std::vector<std::string> ids;
  std::vector<SampledFunction> functions;
  std::map<std::string, std::vector<double>> covariates;
  std::vector<std::string> meta;

  std::size_t size() const noexcept { return functions.size(); }
  std::vector<Site> sites() const;
  std::vector<SrsfFunction> srsfs() const;

  /// Checks shared grid, matching id/covariate lengths, distinct sites and ids.
  void validate() const;

  /// Keeps the listed rows, in order, with their covariates.
  SpatialDataset subset(const std::vector<std::size_t>& rows) const;
  /// Everything except `row`.
  SpatialDataset without(std::size_t row) const;
};

/// Builds a dataset from functions, numbering ids s1, s2, ...
SpatialDataset make_dataset(const Grid& grid, std::vector<SampledFunction> functions);

}  // namespace apsf
