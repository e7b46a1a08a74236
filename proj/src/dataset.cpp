#include <apsf/dataset.hpp>

#include <set>
#include <utility>

namespace apsf {

std::vector<Site> SpatialDataset::sites() const {
  std::vector<Site> out;
  out.reserve(functions.size());
  for (const auto& f : functions) out.push_back(f.site());
  return out;
}

std::vector<SrsfFunction> SpatialDataset::srsfs() const {
  std::vector<SrsfFunction> out;
  out.reserve(functions.size());
  for (const auto& f : functions) out.push_back(srsf_transform(f));
  return out;
}

void SpatialDataset::validate() const {
  if (ids.size() != functions.size()) throw ValidationError("dataset: id count does not match function count");
  std::set<std::string> seen_ids;
  std::set<std::pair<double, double>> seen_sites;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (!(functions[i].grid() == grid)) throw ValidationError("dataset: function " + ids[i] + " is off-grid");
    if (!seen_ids.insert(ids[i]).second) throw ValidationError("dataset: duplicate site id " + ids[i]);
    const Site& s = functions[i].site();
    if (!seen_sites.insert({s.x(), s.y()}).second) throw ValidationError("dataset: duplicate site at " + ids[i]);
  }
  for (const auto& [name, values] : covariates) {
    if (values.size() != functions.size()) throw ValidationError("dataset: covariate " + name + " has wrong length");
  }
}

SpatialDataset SpatialDataset::subset(const std::vector<std::size_t>& rows) const {
  SpatialDataset out;
  out.grid = grid;
  out.meta = meta;
  for (std::size_t r : rows) {
    out.ids.push_back(ids.at(r));
    out.functions.push_back(functions.at(r));
  }
  for (const auto& [name, values] : covariates) {
    std::vector<double> v;
    for (std::size_t r : rows) v.push_back(values.at(r));
    out.covariates.emplace(name, std::move(v));
  }
  return out;
}

SpatialDataset SpatialDataset::without(std::size_t row) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (i != row) rows.push_back(i);
  return subset(rows);
}

SpatialDataset make_dataset(const Grid& grid, std::vector<SampledFunction> functions) {
  SpatialDataset d;
  d.grid = grid;
  for (std::size_t i = 0; i < functions.size(); ++i) d.ids.push_back("s" + std::to_string(i + 1));
  d.functions = std::move(functions);
  return d;
}

}  // namespace apsf
