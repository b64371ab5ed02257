#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>

#include "qam/kernel.hpp"
#include "qam/points.hpp"

namespace qam {

/// Covariance between two locations (nonstationary kernels).
using PairFn = std::function<double(std::span<const double>, std::span<const double>)>;

/// G(i,j) = k(x_i - x_j). Rows are assembled in parallel; entries are
/// independent, so the result equals gram_matrix_serial bit for bit.
/// A failing or non-finite entry raises an error naming the pair (i, j).
[[nodiscard]] Eigen::MatrixXd gram_matrix(const Kernel& k, const PointSet& points);
[[nodiscard]] Eigen::MatrixXd gram_matrix_serial(const Kernel& k, const PointSet& points);

/// G(i,j) = c(x_i, x_j).
[[nodiscard]] Eigen::MatrixXd gram_matrix(const PairFn& c, const PointSet& points);
[[nodiscard]] Eigen::MatrixXd gram_matrix_serial(const PairFn& c, const PointSet& points);

/// PairFn view of a stationary kernel.
[[nodiscard]] PairFn stationary_pair(const Kernel& k);

}  // namespace qam
