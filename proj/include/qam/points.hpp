#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qam {

/// n points in R^dim, stored row-major.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> coords);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  [[nodiscard]] const std::vector<double>& coords() const noexcept { return coords_; }

  void push_back(std::span<const double> p);

  /// Points uniform in the box prod_k [lo[k], hi[k]], reproducible from seed.
  static PointSet uniform(std::size_t n, std::span<const double> lo, std::span<const double> hi,
                          std::uint64_t seed);
  /// Points uniform in [0, 1]^dim.
  static PointSet unit_cube(std::size_t n, std::size_t dim, std::uint64_t seed);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Copy of `points` without exact duplicates (first occurrence kept).
[[nodiscard]] PointSet deduplicate(const PointSet& points, std::size_t* removed = nullptr);

/// n log-spaced values from lo to hi inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t n);
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace qam
