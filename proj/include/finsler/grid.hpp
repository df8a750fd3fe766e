#ifndef FINSLER_GRID_HPP
#define FINSLER_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsler {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Configuration and invariant violations that make a computation impossible.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Discretization of the sphere bundle over the periodic chart [0,2pi)^2:
/// nx1 x nx2 base nodes, ntheta fiber nodes. Spacings are 2pi/count exactly.
struct GridSpec {
  int nx1 = 0;
  int nx2 = 0;
  int ntheta = 0;

  static GridSpec make(int nx1, int nx2, int ntheta);

  double hx1() const { return kTwoPi / nx1; }
  double hx2() const { return kTwoPi / nx2; }
  double htheta() const { return kTwoPi / ntheta; }
  double hmin() const;

  double x1(int i) const { return hx1() * i; }
  double x2(int j) const { return hx2() * j; }
  double theta(int k) const { return htheta() * k; }

  std::size_t nodes() const {
    return static_cast<std::size_t>(nx1) * nx2 * ntheta;
  }

  bool operator==(const GridSpec&) const = default;
};

/// Unit tangent/normal pair along the fiber circle: e = (cos t, sin t),
/// m = (-sin t, cos t) per theta node.
class FiberFrame {
 public:
  explicit FiberFrame(int ntheta);
  explicit FiberFrame(const GridSpec& grid) : FiberFrame(grid.ntheta) {}

  double e(int axis, int k) const { return axis == 0 ? cos_[k] : sin_[k]; }
  double m(int axis, int k) const { return axis == 0 ? -sin_[k] : cos_[k]; }
  int ntheta() const { return static_cast<int>(cos_.size()); }

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Shared per-ntheta frame, cached so hot loops do not rebuild tables.
const FiberFrame& fiber_frame(int ntheta);
inline const FiberFrame& fiber_frame(const GridSpec& grid) {
  return fiber_frame(grid.ntheta);
}

}  // namespace finsler

#endif
