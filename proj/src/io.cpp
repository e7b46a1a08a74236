#include <apsf/io.hpp>
#include <apsf/numerics.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace apsf {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, std::size_t line) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) throw ParseError(line, "not a number: '" + s + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void load_covariates(SpatialDataset& d, const fs::path& path) {
  const std::vector<std::string> lines = lines_of(slurp(path));
  if (lines.empty()) throw ParseError(1, "empty covariate file", path.string());
  const std::vector<std::string> header = split(lines[0]);
  if (header.size() < 2 || trim(header[0]) != "site_id") {
    throw ParseError(1, "covariate header must start with site_id", path.string());
  }
  std::map<std::string, std::vector<double>> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (trim(lines[l]).empty()) continue;
    const std::vector<std::string> f = split(lines[l]);
    if (f.size() != header.size()) {
      throw ParseError(l + 1, "expected " + std::to_string(header.size()) + " fields", path.string());
    }
    std::vector<double> v;
    try {
      for (std::size_t c = 1; c < f.size(); ++c) v.push_back(parse_number(f[c], l + 1));
    } catch (const ParseError& e) {
      throw ParseError(e.line(), e.detail(), path.string());
    }
    if (!rows.emplace(trim(f[0]), std::move(v)).second) {
      throw ValidationError(path.string() + ": duplicate site " + trim(f[0]));
    }
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::vector<double> col;
    for (const auto& id : d.ids) {
      const auto it = rows.find(id);
      if (it == rows.end()) throw ValidationError(path.string() + ": no covariates for site " + id);
      col.push_back(it->second[c - 1]);
    }
    d.covariates[trim(header[c])] = std::move(col);
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

SpatialDataset parse_dataset(const std::string& text, const LoadOptions& options) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw ParseError(1, "empty file");
  const std::vector<std::string> header = split(lines[0]);
  if (header.size() < 5 || trim(header[0]) != "site_id" || trim(header[1]) != "x" || trim(header[2]) != "y") {
    throw ParseError(1, "header must be site_id,x,y,t_0,... with at least two samples");
  }
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (trim(header[c]) != "t_" + std::to_string(c - 3)) throw ParseError(1, "unexpected column '" + header[c] + "'");
  }
  const Eigen::Index samples = static_cast<Eigen::Index>(header.size() - 3);
  const Grid grid(options.grid_size > 0 ? options.grid_size : samples);

  SpatialDataset d;
  d.grid = grid;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (trim(lines[l]).empty()) continue;
    const std::vector<std::string> f = split(lines[l]);
    if (f.size() != header.size()) {
      throw ParseError(l + 1, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(f.size()));
    }
    const std::string id = trim(f[0]);
    if (id.empty()) throw ParseError(l + 1, "empty site_id");
    const Site site(parse_number(f[1], l + 1), parse_number(f[2], l + 1));
    Vector v(samples);
    for (Eigen::Index m = 0; m < samples; ++m) v(m) = parse_number(f[static_cast<std::size_t>(m) + 3], l + 1);
    if (grid.size() != samples) v = numerics::resample(v, grid.size());
    d.ids.push_back(id);
    d.functions.emplace_back(grid, std::move(v), site);
  }
  if (d.functions.empty()) throw ParseError(lines.size(), "no data rows");
  d.validate();
  return d;
}

SpatialDataset load_dataset(const fs::path& path, const LoadOptions& options) {
  SpatialDataset d;
  try {
    d = parse_dataset(slurp(path), options);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
  fs::path cov = options.covariates;
  if (cov.empty()) {
    const fs::path sibling = path.parent_path() / "covariates.csv";
    if (fs::exists(sibling) && fs::absolute(sibling) != fs::absolute(path)) cov = sibling;
  }
  if (!cov.empty()) load_covariates(d, cov);
  d.meta.push_back("source=" + path.string());
  d.validate();
  return d;
}

void save_dataset(const SpatialDataset& d, const fs::path& path) {
  d.validate();
  std::vector<std::string> header{"site_id", "x", "y"};
  for (Eigen::Index m = 0; m < d.grid.size(); ++m) header.push_back("t_" + std::to_string(m));
  CsvWriter out(path, header);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.cell(d.ids[i]).cell(d.functions[i].site().x()).cell(d.functions[i].site().y());
    for (Eigen::Index m = 0; m < d.grid.size(); ++m) out.cell(d.functions[i].values()(m));
    out.end_row();
  }
  out.close();
  if (!d.covariates.empty()) {
    std::vector<std::string> cov_header{"site_id"};
    for (const auto& [name, values] : d.covariates) cov_header.push_back(name);
    CsvWriter cov(path.parent_path() / "covariates.csv", cov_header);
    for (std::size_t i = 0; i < d.size(); ++i) {
      cov.cell(d.ids[i]);
      for (const auto& [name, values] : d.covariates) cov.cell(values[i]);
      cov.end_row();
    }
    cov.close();
  }
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) buffer_ += ',';
    buffer_ += header[c];
  }
  buffer_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (in_row_) buffer_ += ',';
  buffer_ += s;
  ++in_row_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw Error(path_.string() + ": row has " + std::to_string(in_row_) + " cells, header has " +
                std::to_string(columns_));
  }
  buffer_ += '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw Error("cannot write " + path_.string());
  out << buffer_;
  if (!out) throw Error("write failed: " + path_.string());
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines_of(slurp(path)))
    if (!line.empty()) rows.push_back(split(line));
  return rows;
}

}  // namespace apsf
