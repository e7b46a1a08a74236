#pragma once

// CSV exchange format:
//   observations: header `site_id,x,y,t_0,...,t_{T-1}`, one row per site;
//   covariates.csv next to it (optional): header `site_id,<name>,...`.
// LF newlines, '.' decimal point, values written as %.17e.

#include <apsf/dataset.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace apsf {

struct LoadOptions {
  /// Resample onto this many grid points; 0 keeps the file's sample count.
  Eigen::Index grid_size = 0;
  /// Explicit covariate file; empty means `covariates.csv` beside the data if present.
  std::filesystem::path covariates;
};

SpatialDataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes the observations to `path` and, when the dataset has covariates,
/// `covariates.csv` in the same directory.
void save_dataset(const SpatialDataset& dataset, const std::filesystem::path& path);

/// Parses an in-memory observation table; covariates are not read.
SpatialDataset parse_dataset(const std::string& text, const LoadOptions& options = {});

std::string format_number(double v);

/// Minimal CSV table writer; throws with the path on failure.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  void end_row();
  void close();
  ~CsvWriter();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  bool closed_ = false;
};

/// Reads a comma-separated file into rows of fields (no quoting support).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace apsf
