#include "qam/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qam/error.hpp"

namespace qam {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto os = open_out(path);
  write_matrix(os, m);
  if (!os) throw ConfigError("write failed: " + path.string());
}

void write_points(std::ostream& os, const std::vector<std::string>& header, const PointSet& points,
                  const std::vector<std::vector<double>>& extra) {
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << format_double(p[k]);
    for (const auto& col : extra) os << ',' << format_double(col[i]);
    os << '\n';
  }
}

PointTable read_points(std::istream& is, const std::string& origin) {
  PointTable t;
  std::vector<double> coords;
  std::size_t dim = 0, line_no = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size() && numeric; ++k) numeric = parse_double(cells[k], row[k]);
    if (!numeric) {
      if (dim == 0 && t.header.empty()) {
        t.header = cells;
        continue;
      }
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) + " columns, got " +
                        std::to_string(row.size()));
    }
    coords.insert(coords.end(), row.begin(), row.end());
  }
  if (dim == 0) throw ConfigError(origin + ": no points");
  if (!t.header.empty() && t.header.size() != dim) {
    throw ConfigError(origin + ": header has " + std::to_string(t.header.size()) + " columns, rows have " +
                      std::to_string(dim));
  }
  t.points = PointSet(dim, std::move(coords));
  return t;
}

PointTable read_points(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  return read_points(is, path.string());
}

}  // namespace qam
