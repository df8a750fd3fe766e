#ifndef FINSLER_GEOMETRY_HPP
#define FINSLER_GEOMETRY_HPP

#include <map>
#include <optional>
#include <string>

#include "finsler/field.hpp"
#include "finsler/vertical.hpp"

namespace finsler {

/// Raised when a metric loses positive definiteness; the message names the
/// worst node and its margin.
class DegenerateMetricError : public std::runtime_error {
 public:
  explicit DegenerateMetricError(const std::string& what)
      : std::runtime_error(what) {}
};

struct GridNode {
  int ix1 = 0, ix2 = 0, itheta = 0;
};

/// A Finsler structure restricted to the unit fiber: phi = F(x, cos t, sin t),
/// a positive degree-1 scalar with strong convexity margin phi + phi_tt > 0.
struct FinslerField {
  HomogeneousField phi;
  std::string family;

  /// Pointwise phi + phi_thetatheta, the n=2 strong-convexity indicator.
  HomogeneousField convexity_margin() const;
  /// Minimum of phi and of the margin over the grid, with the worst node.
  void positivity_stats(double* min_phi, double* min_margin,
                        GridNode* worst) const;
};

/// Fundamental tensor g_ij = (1/2)[F^2]_{y^i y^j} together with its pointwise
/// closed-form 2x2 inverse. Symmetric bitwise; positive definite everywhere.
struct MetricField {
  HomogeneousField g;      // (0,2) degree 0
  HomogeneousField g_inv;  // (2,0) degree 0
  double min_det = 0.0;
  GridNode worst;
};

/// Nonlinear connection (N^j_i, slots [j][i]) and Cartan horizontal
/// coefficients (Gamma^i_{jk}, slots [i][j][k], symmetric in jk).
struct ConnectionField {
  HomogeneousField N;
  HomogeneousField gamma;
};

/// When d_f2_out is given it receives the intermediate dF^2/dy^h covector
/// (one vertical derivative), which the spray assembly can reuse.
MetricField fundamental_tensor(const FinslerField& f,
                               HomogeneousField* d_f2_out = nullptr);

/// Non-throwing variant for flow stepping: nullopt when positive definiteness
/// fails anywhere.
std::optional<MetricField> try_fundamental_tensor(
    const FinslerField& f, HomogeneousField* d_f2_out = nullptr);

/// Pointwise inverse of a symmetric positive (0,2) field.
HomogeneousField invert_metric(const HomogeneousField& g, double* min_det,
                               GridNode* worst);

/// delta_j applied to every component of a degree-0 field:
/// delta_j S = dS/dx^j - N^r_j dS/dy^r. Appends the direction slot FIRST.
HomogeneousField delta_derivative(const HomogeneousField& s,
                                  const HomogeneousField& n_conn);

/// Cartan horizontal coefficients in the coordinate frame:
/// Gamma^i_{jk} = 1/2 g^{is} (delta_j g_sk + delta_k g_js - delta_s g_jk).
ConnectionField cartan_horizontal_coefficients(const MetricField& m,
                                               const HomogeneousField& n_conn);

/// Horizontal covariant derivative of a symmetric (0,2) degree-0 field:
/// (nabla_k S)_ij = delta_k S_ij - Gamma^r_{ki} S_rj - Gamma^r_{kj} S_ir.
/// Result slots are [k][i][j] (direction first).
HomogeneousField horizontal_covariant_derivative_02(const HomogeneousField& s,
                                                    const ConnectionField& conn);

/// Named metric families on the periodic chart. Grid families: "euclidean",
/// "minkowski-quartic" (param c), "conformal-torus" (param a),
/// "randers-torus" (params b1, b2, mod). Chart-restricted families
/// ("funk-disk", "sphere-chart") are pointwise-only; see pointwise.hpp.
using MetricParams = std::map<std::string, double>;

bool is_grid_family(const std::string& family);
bool is_pointwise_family(const std::string& family);

FinslerField make_zoo_metric(const GridSpec& grid, const std::string& family,
                             const MetricParams& params);

/// Validates a family name and its parameter keys without building samples.
void validate_zoo_request(const std::string& family, const MetricParams& params);

}  // namespace finsler

#endif
