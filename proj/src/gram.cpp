#include "qam/gram.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "qam/error.hpp"
#include "qam/parallel.hpp"

namespace qam {
namespace {

double entry(const PairFn& c, const PointSet& p, std::size_t i, std::size_t j) {
  double v;
  try {
    v = c(p[i], p[j]);
  } catch (const Error& e) {
    std::ostringstream os;
    os << "gram: evaluation failed at pair (" << i << ", " << j << "): " << e.what();
    throw NumericError(os.str());
  }
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "gram: non-finite value " << v << " at pair (" << i << ", " << j << ")";
    throw NumericError(os.str());
  }
  return v;
}

void fill_row(const PairFn& c, const PointSet& p, Eigen::MatrixXd& g, std::size_t i) {
  for (std::size_t j = i; j < p.size(); ++j) {
    const double v = entry(c, p, i, j);
    g(i, j) = v;
    g(j, i) = v;
  }
}

}  // namespace

PairFn stationary_pair(const Kernel& k) {
  return [k](std::span<const double> a, std::span<const double> b) {
    double buf[16];
    std::vector<double> heap;
    double* lag = buf;
    if (a.size() > 16) {
      heap.resize(a.size());
      lag = heap.data();
    }
    for (std::size_t i = 0; i < a.size(); ++i) lag[i] = a[i] - b[i];
    return k.eval({lag, a.size()});
  };
}

Eigen::MatrixXd gram_matrix_serial(const PairFn& c, const PointSet& points) {
  const std::size_t n = points.size();
  Eigen::MatrixXd g(n, n);
  for (std::size_t i = 0; i < n; ++i) fill_row(c, points, g, i);
  return g;
}

Eigen::MatrixXd gram_matrix(const PairFn& c, const PointSet& points) {
  const long n = static_cast<long>(points.size());
  Eigen::MatrixXd g(n, n);
  FirstError err;
  configured_threads();
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      fill_row(c, points, g, static_cast<std::size_t>(i));
    } catch (...) {
      err.capture(i);
    }
  }
  err.rethrow();
  return g;
}

static void check_dim(const Kernel& k, const PointSet& points) {
  if (points.size() > 0 && points.dim() != k.dim()) {
    std::ostringstream os;
    os << "gram: points have dimension " << points.dim() << " but kernel " << k.name()
       << " expects " << k.dim();
    throw DomainError(os.str());
  }
}

Eigen::MatrixXd gram_matrix(const Kernel& k, const PointSet& points) {
  check_dim(k, points);
  return gram_matrix(stationary_pair(k), points);
}

Eigen::MatrixXd gram_matrix_serial(const Kernel& k, const PointSet& points) {
  check_dim(k, points);
  return gram_matrix_serial(stationary_pair(k), points);
}

}  // namespace qam
