#include <apsf/io.hpp>
#include <apsf/plots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace apsf {

namespace fs = std::filesystem;

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void axes(std::ostringstream& svg, const PlotFrame& f, const std::string& title, const std::string& xlabel,
          const std::string& ylabel) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" stroke=\"#444\"/>\n",
                f.left, f.top, f.width, f.height);
  svg << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"13\">%s</text>\n", f.left, f.top - 10,
                escape(title).c_str());
  svg << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"11\">%s</text>\n",
                f.left + f.width / 2 - 20, f.top + f.height + 30, escape(xlabel).c_str());
  svg << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"11\">%s</text>\n", f.left - 55,
                f.top + f.height / 2, escape(ylabel).c_str());
  svg << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x_min + (f.x_max - f.x_min) * k / 4.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * k / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"9\">%.3g</text>\n", f.px(xv) - 8,
                  f.top + f.height + 14, xv);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" font-size=\"9\">%.3g</text>\n", f.left - 40,
                  f.py(yv) + 3, yv);
    svg << buf;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string svg_open(double width, double height) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f "
                "%.0f\">\n<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                width, height, width, height);
  return buf;
}

}  // namespace

double PlotFrame::px(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }

double PlotFrame::py(double y) const { return top + (y_max - y) / (y_max - y_min) * height; }

PlotFrame PlotFrame::fit(double x_min, double x_max, double y_min, double y_max) {
  PlotFrame f;
  if (!(x_max > x_min)) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (!(y_max > y_min)) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double pad = 0.05 * (y_max - y_min);
  f.x_min = x_min;
  f.x_max = x_max;
  f.y_min = y_min - pad;
  f.y_max = y_max + pad;
  return f;
}

std::string format_pixel(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_variogram_plot(const fs::path& svg_path, const fs::path& csv_path,
                          const std::vector<VariogramPanel>& panels) {
  constexpr int kCurvePoints = 100;
  const double panel_width = 400.0, gap = 90.0;
  std::ostringstream svg;
  svg << svg_open(60 + panels.size() * (panel_width + gap), 340);
  CsvWriter csv(csv_path, {"panel", "kind", "lag", "semivariance", "px", "py"});

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    double lag_max = 0.0, y_max = 0.0;
    for (const auto& b : panel.empirical.bins) {
      lag_max = std::max(lag_max, b.lag);
      y_max = std::max(y_max, b.semivariance);
    }
    lag_max *= 1.05;
    std::vector<std::pair<double, double>> curve;
    for (int k = 0; k <= kCurvePoints; ++k) {
      const double h = lag_max * k / kCurvePoints;
      curve.emplace_back(h, panel.model(h));
      y_max = std::max(y_max, curve.back().second);
    }
    PlotFrame f = PlotFrame::fit(0.0, lag_max, 0.0, y_max);
    f.left = 60 + p * (panel_width + gap);
    f.width = panel_width;
    axes(svg, f, panel.name, "lag", "semivariance");

    for (const auto& b : panel.empirical.bins) {
      const std::string x = format_pixel(f.px(b.lag)), y = format_pixel(f.py(b.semivariance));
      svg << "<circle class=\"bin\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
      csv.cell(panel.name).cell(std::string("bin")).cell(b.lag).cell(b.semivariance).cell(x).cell(y).end_row();
    }
    svg << "<polyline class=\"model\" fill=\"none\" stroke=\"#d62728\" points=\"";
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const std::string x = format_pixel(f.px(curve[k].first)), y = format_pixel(f.py(curve[k].second));
      svg << (k ? " " : "") << x << "," << y;
      csv.cell(panel.name).cell(std::string("model")).cell(curve[k].first).cell(curve[k].second).cell(x).cell(y)
          .end_row();
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  csv.close();
  write_text(svg_path, svg.str());
}

void write_prediction_plot(const fs::path& svg_path, const fs::path& csv_path,
                           const std::vector<PredictionCurves>& targets) {
  const double panel_height = 220.0, gap = 70.0;
  std::ostringstream svg;
  svg << svg_open(520, 40 + targets.size() * (panel_height + gap));
  CsvWriter csv(csv_path, {"target", "curve", "t", "value", "px", "py"});
  const char* names[] = {"truth", "apk", "ok"};
  const char* colors[] = {"#000000", "#d62728", "#1f77b4"};

  for (std::size_t p = 0; p < targets.size(); ++p) {
    const auto& tg = targets[p];
    const Vector* curves[] = {&tg.truth, &tg.apk, &tg.ok};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vector* c : curves) {
      if (c->size() != tg.t.size()) throw InvalidInput("prediction plot: curve length mismatch");
      lo = std::min(lo, c->minCoeff());
      hi = std::max(hi, c->maxCoeff());
    }
    PlotFrame f = PlotFrame::fit(tg.t.minCoeff(), tg.t.maxCoeff(), lo, hi);
    f.top = 40 + p * (panel_height + gap);
    f.height = panel_height;
    axes(svg, f, "target " + tg.target + " (black truth, red amplitude-phase, blue ordinary)", "t", "value");
    for (int c = 0; c < 3; ++c) {
      svg << "<polyline class=\"" << names[c] << "\" data-target=\"" << escape(tg.target)
          << "\" fill=\"none\" stroke=\"" << colors[c] << "\" points=\"";
      for (Eigen::Index m = 0; m < tg.t.size(); ++m) {
        const std::string x = format_pixel(f.px(tg.t(m))), y = format_pixel(f.py((*curves[c])(m)));
        svg << (m ? " " : "") << x << "," << y;
        csv.cell(tg.target).cell(std::string(names[c])).cell(tg.t(m)).cell((*curves[c])(m)).cell(x).cell(y).end_row();
      }
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  csv.close();
  write_text(svg_path, svg.str());
}

void write_site_map(const fs::path& svg_path, const fs::path& csv_path, const std::string& title,
                    const std::vector<std::string>& ids, const std::vector<Site>& sites,
                    const std::vector<int>& labels) {
  if (ids.size() != sites.size() || labels.size() != sites.size()) throw InvalidInput("site map: length mismatch");
  if (sites.empty()) throw InvalidInput("site map: no sites");
  double x0 = sites[0].x(), x1 = x0, y0 = sites[0].y(), y1 = y0;
  for (const auto& s : sites) {
    x0 = std::min(x0, s.x());
    x1 = std::max(x1, s.x());
    y0 = std::min(y0, s.y());
    y1 = std::max(y1, s.y());
  }
  const double xpad = 0.05 * std::max(x1 - x0, 1e-9);
  PlotFrame f = PlotFrame::fit(x0 - xpad, x1 + xpad, y0, y1);
  f.width = 420;
  f.height = 420;
  std::ostringstream svg;
  svg << svg_open(540, 500);
  axes(svg, f, title, "x", "y");
  CsvWriter csv(csv_path, {"site_id", "x", "y", "cluster", "px", "py"});
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const std::string x = format_pixel(f.px(sites[i].x())), y = format_pixel(f.py(sites[i].y()));
    const int c = labels[i];
    svg << "<circle class=\"site\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"5\" fill=\""
        << kPalette[static_cast<std::size_t>(std::max(c - 1, 0)) % 10] << "\"><title>" << escape(ids[i]) << " cluster "
        << c << "</title></circle>\n";
    csv.cell(ids[i]).cell(sites[i].x()).cell(sites[i].y()).cell(static_cast<long long>(c)).cell(x).cell(y).end_row();
  }
  svg << "</svg>\n";
  csv.close();
  write_text(svg_path, svg.str());
}

}  // namespace apsf
