#include "finsler/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace finsler {

GridSpec GridSpec::make(int nx1, int nx2, int ntheta) {
  if (nx1 < 8 || nx2 < 8 || ntheta < 8) {
    throw ConfigError("grid counts must all be >= 8, got " +
                      std::to_string(nx1) + "x" + std::to_string(nx2) + "x" +
                      std::to_string(ntheta));
  }
  if (ntheta % 2 != 0) {
    throw ConfigError("ntheta must be even for spectral differentiation, got " +
                      std::to_string(ntheta));
  }
  return GridSpec{nx1, nx2, ntheta};
}

double GridSpec::hmin() const { return std::min({hx1(), hx2(), htheta()}); }

FiberFrame::FiberFrame(int ntheta) : cos_(ntheta), sin_(ntheta) {
  const double h = kTwoPi / ntheta;
  for (int k = 0; k < ntheta; ++k) {
    cos_[k] = std::cos(h * k);
    sin_[k] = std::sin(h * k);
  }
}

const FiberFrame& fiber_frame(int ntheta) {
  static std::mutex mu;
  static std::map<int, FiberFrame> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(ntheta);
  if (it == cache.end()) {
    it = cache.emplace(ntheta, FiberFrame(ntheta)).first;
  }
  return it->second;
}

}  // namespace finsler
