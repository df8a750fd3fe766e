#ifndef FINSLER_FIELD_HPP
#define FINSLER_FIELD_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "finsler/grid.hpp"

namespace finsler {

/// Index variance of one tensor slot.
enum class Var : std::uint8_t { Upper, Lower };

/// Samples of a y-homogeneous tensor field on the sphere-bundle grid.
///
/// A component function psi(x, theta) represents the ambient value at
/// y = r (cos theta, sin theta) as r^degree * psi(x, theta). Components are
/// stored as [comp][ix1][ix2][itheta] with theta fastest; a rank-r tensor in
/// dimension 2 has 2^r components, component index built by comp_index().
class HomogeneousField {
 public:
  HomogeneousField() = default;
  HomogeneousField(const GridSpec& grid, int degree, std::vector<Var> variance);

  static HomogeneousField scalar(const GridSpec& grid, int degree) {
    return HomogeneousField(grid, degree, {});
  }

  const GridSpec& grid() const { return grid_; }
  int degree() const { return degree_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  int components() const { return 1 << rank(); }
  const std::vector<Var>& variance() const { return variance_; }

  static int comp_index(int i) { return i; }
  static int comp_index(int i, int j) { return i * 2 + j; }
  static int comp_index(int i, int j, int k) { return (i * 2 + j) * 2 + k; }

  double& at(int c, int i, int j, int k) { return data_[offset(c, i, j, k)]; }
  double at(int c, int i, int j, int k) const { return data_[offset(c, i, j, k)]; }

  std::span<double> component(int c) {
    return {data_.data() + c * grid_.nodes(), grid_.nodes()};
  }
  std::span<const double> component(int c) const {
    return {data_.data() + c * grid_.nodes(), grid_.nodes()};
  }
  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  bool finite() const;

  /// In-place linear update: this += a * other (same shape required).
  HomogeneousField& axpy(double a, const HomogeneousField& other);
  HomogeneousField& operator*=(double a);

  /// Largest |this - other| over all components and nodes.
  double max_abs_diff(const HomogeneousField& other) const;
  double max_abs() const;

  bool same_shape(const HomogeneousField& other) const {
    return grid_ == other.grid_ && variance_.size() == other.variance_.size();
  }

 private:
  std::size_t offset(int c, int i, int j, int k) const {
    return ((static_cast<std::size_t>(c) * grid_.nx1 + i) * grid_.nx2 + j) *
               grid_.ntheta +
           k;
  }

  GridSpec grid_;
  int degree_ = 0;
  std::vector<Var> variance_;
  std::vector<double> data_;
};

/// Splits [0, n) into chunks and runs fn(begin, end) on each. Worker count
/// comes from the FINSLER_THREADS environment variable (default 1); results
/// must not depend on the split, so only disjoint writes are allowed.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

int worker_count();

}  // namespace finsler

#endif
