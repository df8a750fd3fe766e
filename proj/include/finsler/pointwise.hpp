#ifndef FINSLER_POINTWISE_HPP
#define FINSLER_POINTWISE_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "finsler/grid.hpp"

namespace finsler {

/// phi(x1, x2, theta) for a chart-restricted metric (not necessarily
/// periodic in x).
using ChartMetric = std::function<double(double, double, double)>;

/// Curvature pipeline evaluated at one chart point via a local dense x-stencil
/// (spacing eps) and the full fiber circle. Arrays run over theta nodes.
struct PointwiseCurvature {
  int ntheta = 0;
  std::vector<double> phi;
  std::vector<double> det_g;
  std::array<std::vector<double>, 4> spray_g;  // only G^1, G^2 used ([0],[1])
  std::array<std::vector<double>, 4> r;        // R^i_k, slots [i*2+k]
  std::vector<double> ric;                     // trace
  std::array<std::vector<double>, 4> ric_tensor;
};

PointwiseCurvature pointwise_curvature(const ChartMetric& phi,
                                       std::array<double, 2> x0, int ntheta,
                                       double eps);

/// Chart metrics for the pointwise-only zoo families.
ChartMetric make_chart_metric(const std::string& family);

}  // namespace finsler

#endif
