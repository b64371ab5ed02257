#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qam/points.hpp"

namespace qam {

/// Shortest round-trip decimal form ('.' separator, locale independent).
[[nodiscard]] std::string format_double(double v);

/// Rows as comma-separated values, no header, '\n' after every row.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Header row, then one row per point with optional trailing value columns.
void write_points(std::ostream& os, const std::vector<std::string>& header, const PointSet& points,
                  const std::vector<std::vector<double>>& extra = {});

struct PointTable {
  std::vector<std::string> header;  // empty when the file has none
  PointSet points;
};

/// Reads numeric rows; a first row that does not parse as numbers is the header.
[[nodiscard]] PointTable read_points(std::istream& is, const std::string& origin = "<stream>");
[[nodiscard]] PointTable read_points(const std::filesystem::path& path);

}  // namespace qam
