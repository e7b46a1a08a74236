#pragma once

// Static SVG figures, each written together with the CSV of the plotted
// coordinates (data and pixel positions).

#include <apsf/fdcore.hpp>
#include <apsf/variogram.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace apsf {

/// Linear map from a data window onto a pixel panel (y axis pointing down).
struct PlotFrame {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  double left = 60.0, top = 30.0, width = 400.0, height = 260.0;

  double px(double x) const;
  double py(double y) const;
  /// Frame covering the data with 5% vertical padding; degenerate ranges are widened.
  static PlotFrame fit(double x_min, double x_max, double y_min, double y_max);
};

/// Pixel coordinates are rounded to this many decimals in both SVG and CSV.
std::string format_pixel(double v);

struct VariogramPanel {
  std::string name;
  EmpiricalVariogram empirical;
  VariogramModel model;
};

/// One panel per entry: a circle per bin and the fitted curve.
void write_variogram_plot(const std::filesystem::path& svg, const std::filesystem::path& csv,
                          const std::vector<VariogramPanel>& panels);

struct PredictionCurves {
  std::string target;
  Vector t;
  Vector truth;
  Vector apk;
  Vector ok;
};

/// One panel per target with truth, amplitude-phase and baseline polylines.
void write_prediction_plot(const std::filesystem::path& svg, const std::filesystem::path& csv,
                           const std::vector<PredictionCurves>& targets);

/// Sites coloured by cluster label.
void write_site_map(const std::filesystem::path& svg, const std::filesystem::path& csv, const std::string& title,
                    const std::vector<std::string>& ids, const std::vector<Site>& sites,
                    const std::vector<int>& labels);

}  // namespace apsf
