#include "finsler/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace finsler {

HomogeneousField::HomogeneousField(const GridSpec& grid, int degree,
                                   std::vector<Var> variance)
    : grid_(grid), degree_(degree), variance_(std::move(variance)) {
  data_.assign(grid_.nodes() << variance_.size(), 0.0);
}

bool HomogeneousField::finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

HomogeneousField& HomogeneousField::axpy(double a, const HomogeneousField& o) {
  if (!same_shape(o)) throw ConfigError("axpy: field shape mismatch");
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += a * o.data_[n];
  return *this;
}

HomogeneousField& HomogeneousField::operator*=(double a) {
  for (double& v : data_) v *= a;
  return *this;
}

double HomogeneousField::max_abs_diff(const HomogeneousField& o) const {
  if (!same_shape(o)) throw ConfigError("max_abs_diff: field shape mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < data_.size(); ++n) {
    m = std::max(m, std::abs(data_[n] - o.data_[n]));
  }
  return m;
}

double HomogeneousField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

int worker_count() {
  static const int n = [] {
    const char* env = std::getenv("FINSLER_THREADS");
    if (env == nullptr) return 1;
    int v = std::atoi(env);
    return std::clamp(v, 1, 64);
  }();
  return n;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) {
    const std::size_t b = std::min(n, chunk * w);
    const std::size_t e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(fn, b, e);
  }
  fn(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace finsler
