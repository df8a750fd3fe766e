#include "finsler/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace finsler {

namespace {

std::string node_str(const GridSpec& g, const GridNode& n) {
  std::ostringstream os;
  os << "(ix1=" << n.ix1 << ", ix2=" << n.ix2 << ", itheta=" << n.itheta
     << "; x1=" << g.x1(n.ix1) << ", x2=" << g.x2(n.ix2)
     << ", theta=" << g.theta(n.itheta) << ")";
  return os.str();
}

GridNode unflatten(const GridSpec& g, std::size_t n) {
  GridNode node;
  node.itheta = static_cast<int>(n % g.ntheta);
  n /= g.ntheta;
  node.ix2 = static_cast<int>(n % g.nx2);
  node.ix1 = static_cast<int>(n / g.nx2);
  return node;
}

}  // namespace

HomogeneousField FinslerField::convexity_margin() const {
  HomogeneousField m = theta_derivative(phi, 2);
  m.axpy(1.0, phi);
  return m;
}

void FinslerField::positivity_stats(double* min_phi, double* min_margin,
                                    GridNode* worst) const {
  const HomogeneousField margin = convexity_margin();
  auto p = phi.component(0);
  auto mg = margin.component(0);
  double mp = p[0], mm = mg[0];
  std::size_t at = 0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (p[n] < mp) mp = p[n];
    if (mg[n] < mm) {
      mm = mg[n];
      at = n;
    }
  }
  if (min_phi) *min_phi = mp;
  if (min_margin) *min_margin = mm;
  if (worst) *worst = unflatten(phi.grid(), at);
}

HomogeneousField invert_metric(const HomogeneousField& g, double* min_det,
                               GridNode* worst) {
  HomogeneousField inv(g.grid(), 0, {Var::Upper, Var::Upper});
  auto g11 = g.component(0), g12 = g.component(1), g22 = g.component(3);
  auto i11 = inv.component(0), i12 = inv.component(1), i21 = inv.component(2),
       i22 = inv.component(3);
  double mdet = g11.empty() ? 0.0 : g11[0] * g22[0] - g12[0] * g12[0];
  std::size_t at = 0;
  for (std::size_t n = 0; n < g11.size(); ++n) {
    const double det = g11[n] * g22[n] - g12[n] * g12[n];
    if (det < mdet) {
      mdet = det;
      at = n;
    }
    i11[n] = g22[n] / det;
    i22[n] = g11[n] / det;
    i12[n] = -g12[n] / det;
    i21[n] = i12[n];
  }
  if (min_det) *min_det = mdet;
  if (worst) *worst = unflatten(g.grid(), at);
  return inv;
}

namespace {

// g = (1/2) yD(yD(phi^2)), symmetrized bitwise.
MetricField metric_from_phi(const FinslerField& f, HomogeneousField* d_f2_out) {
  const GridSpec& grid = f.phi.grid();
  HomogeneousField f2 = HomogeneousField::scalar(grid, 2);
  {
    auto p = f.phi.component(0);
    auto o = f2.component(0);
    for (std::size_t n = 0; n < p.size(); ++n) o[n] = p[n] * p[n];
  }
  HomogeneousField d_f2 = y_derivative(f2);
  HomogeneousField hess = y_derivative(d_f2);
  if (d_f2_out) *d_f2_out = std::move(d_f2);

  MetricField m;
  m.g = HomogeneousField(grid, 0, {Var::Lower, Var::Lower});
  auto h11 = hess.component(0), h12 = hess.component(1),
       h21 = hess.component(2), h22 = hess.component(3);
  auto g11 = m.g.component(0), g12 = m.g.component(1), g21 = m.g.component(2),
       g22 = m.g.component(3);
  for (std::size_t n = 0; n < h11.size(); ++n) {
    g11[n] = 0.5 * h11[n];
    g22[n] = 0.5 * h22[n];
    g12[n] = 0.25 * (h12[n] + h21[n]);
    g21[n] = g12[n];
  }
  m.g_inv = invert_metric(m.g, &m.min_det, &m.worst);
  return m;
}

bool metric_positive(const MetricField& m) {
  if (m.min_det <= 0.0) return false;
  auto g11 = m.g.component(0);
  for (double v : g11) {
    if (!(v > 0.0)) return false;
  }
  return true;
}

}  // namespace

MetricField fundamental_tensor(const FinslerField& f,
                               HomogeneousField* d_f2_out) {
  MetricField m = metric_from_phi(f, d_f2_out);
  if (!metric_positive(m) || !m.g.finite()) {
    std::ostringstream os;
    os << "fundamental tensor not positive definite: min det g = " << m.min_det
       << " at node " << node_str(f.phi.grid(), m.worst);
    throw DegenerateMetricError(os.str());
  }
  return m;
}

std::optional<MetricField> try_fundamental_tensor(const FinslerField& f,
                                                  HomogeneousField* d_f2_out) {
  MetricField m = metric_from_phi(f, d_f2_out);
  if (!metric_positive(m) || !m.g.finite()) return std::nullopt;
  return m;
}

HomogeneousField delta_derivative(const HomogeneousField& s,
                                  const HomogeneousField& n_conn) {
  const GridSpec& grid = s.grid();
  const HomogeneousField sy = y_derivative(s);  // slots [...s][r], degree -1

  std::vector<Var> var = s.variance();
  var.insert(var.begin(), Var::Lower);
  HomogeneousField out(grid, s.degree(), std::move(var));

  const int comps = s.components();
  for (int axis = 1; axis <= 2; ++axis) {
    const HomogeneousField sx = x_derivative(s, axis, 1);
    for (int c = 0; c < comps; ++c) {
      auto o = out.component((axis - 1) * comps + c);
      auto dx = sx.component(c);
      // N^r_axis contracted against dS/dy^r
      auto n0 = n_conn.component(HomogeneousField::comp_index(0, axis - 1));
      auto n1 = n_conn.component(HomogeneousField::comp_index(1, axis - 1));
      auto sy0 = sy.component(c * 2 + 0);
      auto sy1 = sy.component(c * 2 + 1);
      parallel_for(grid.nodes(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
          o[n] = dx[n] - n0[n] * sy0[n] - n1[n] * sy1[n];
        }
      });
    }
  }
  return out;
}

ConnectionField cartan_horizontal_coefficients(const MetricField& m,
                                               const HomogeneousField& n_conn) {
  const GridSpec& grid = m.g.grid();
  const HomogeneousField dg = delta_derivative(m.g, n_conn);  // [dir][i][j]

  ConnectionField conn;
  conn.N = n_conn;
  conn.gamma = HomogeneousField(grid, 0, {Var::Upper, Var::Lower, Var::Lower});

  auto dgc = [&](int dir, int i, int j) {
    return dg.component((dir * 2 + i) * 2 + j);
  };
  for (int jj = 0; jj < 2; ++jj) {
    for (int kk = jj; kk < 2; ++kk) {
      // bracket_s = delta_j g_sk + delta_k g_js - delta_s g_jk
      std::array<std::span<const double>, 2> br_a{dgc(jj, 0, kk), dgc(jj, 1, kk)};
      std::array<std::span<const double>, 2> br_b{dgc(kk, jj, 0), dgc(kk, jj, 1)};
      std::array<std::span<const double>, 2> br_c{dgc(0, jj, kk), dgc(1, jj, kk)};
      for (int i = 0; i < 2; ++i) {
        auto gi0 = m.g_inv.component(HomogeneousField::comp_index(i, 0));
        auto gi1 = m.g_inv.component(HomogeneousField::comp_index(i, 1));
        auto o = conn.gamma.component(HomogeneousField::comp_index(i, jj, kk));
        parallel_for(grid.nodes(), [&](std::size_t b, std::size_t e) {
          for (std::size_t n = b; n < e; ++n) {
            const double b0 = br_a[0][n] + br_b[0][n] - br_c[0][n];
            const double b1 = br_a[1][n] + br_b[1][n] - br_c[1][n];
            o[n] = 0.5 * (gi0[n] * b0 + gi1[n] * b1);
          }
        });
        if (kk != jj) {
          auto osym = conn.gamma.component(HomogeneousField::comp_index(i, kk, jj));
          std::copy(o.begin(), o.end(), osym.begin());
        }
      }
    }
  }
  return conn;
}

HomogeneousField horizontal_covariant_derivative_02(const HomogeneousField& s,
                                                    const ConnectionField& conn) {
  const GridSpec& grid = s.grid();
  if (s.rank() != 2) {
    throw ConfigError("horizontal_covariant_derivative_02 expects a (0,2) field");
  }
  HomogeneousField out = delta_derivative(s, conn.N);  // [k][i][j]
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        auto o = out.component((k * 2 + i) * 2 + j);
        auto gm0i = conn.gamma.component(HomogeneousField::comp_index(0, k, i));
        auto gm1i = conn.gamma.component(HomogeneousField::comp_index(1, k, i));
        auto gm0j = conn.gamma.component(HomogeneousField::comp_index(0, k, j));
        auto gm1j = conn.gamma.component(HomogeneousField::comp_index(1, k, j));
        auto s0j = s.component(HomogeneousField::comp_index(0, j));
        auto s1j = s.component(HomogeneousField::comp_index(1, j));
        auto si0 = s.component(HomogeneousField::comp_index(i, 0));
        auto si1 = s.component(HomogeneousField::comp_index(i, 1));
        parallel_for(grid.nodes(), [&](std::size_t b, std::size_t e) {
          for (std::size_t n = b; n < e; ++n) {
            o[n] -= gm0i[n] * s0j[n] + gm1i[n] * s1j[n] + gm0j[n] * si0[n] +
                    gm1j[n] * si1[n];
          }
        });
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric zoo
// ---------------------------------------------------------------------------

namespace {

struct FamilyInfo {
  bool grid_based;
  std::vector<std::string> param_keys;
};

const std::map<std::string, FamilyInfo>& zoo_registry() {
  static const std::map<std::string, FamilyInfo> reg = {
      {"euclidean", {true, {}}},
      {"minkowski-quartic", {true, {"c"}}},
      {"conformal-torus", {true, {"a"}}},
      {"randers-torus", {true, {"b1", "b2", "mod"}}},
      {"funk-disk", {false, {}}},
      {"sphere-chart", {false, {}}},
  };
  return reg;
}

double param_or(const MetricParams& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

}  // namespace

bool is_grid_family(const std::string& family) {
  auto it = zoo_registry().find(family);
  return it != zoo_registry().end() && it->second.grid_based;
}

bool is_pointwise_family(const std::string& family) {
  auto it = zoo_registry().find(family);
  return it != zoo_registry().end() && !it->second.grid_based;
}

void validate_zoo_request(const std::string& family, const MetricParams& params) {
  auto it = zoo_registry().find(family);
  if (it == zoo_registry().end()) {
    throw ConfigError("unknown metric family '" + family + "'");
  }
  for (const auto& [key, value] : params) {
    const auto& allowed = it->second.param_keys;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown parameter '" + key + "' for metric family '" +
                        family + "'");
    }
    (void)value;
  }
}

FinslerField make_zoo_metric(const GridSpec& grid, const std::string& family,
                             const MetricParams& params) {
  validate_zoo_request(family, params);
  if (!is_grid_family(family)) {
    throw ConfigError("metric family '" + family +
                      "' is chart-restricted (pointwise only) and cannot be "
                      "sampled on the periodic grid");
  }

  FinslerField f;
  f.family = family;
  f.phi = HomogeneousField::scalar(grid, 1);
  auto p = f.phi.component(0);

  auto fill = [&](auto&& fn) {
    for (int i = 0; i < grid.nx1; ++i) {
      for (int j = 0; j < grid.nx2; ++j) {
        for (int k = 0; k < grid.ntheta; ++k) {
          const std::size_t n =
              (static_cast<std::size_t>(i) * grid.nx2 + j) * grid.ntheta + k;
          p[n] = fn(grid.x1(i), grid.x2(j), grid.theta(k));
        }
      }
    }
  };

  if (family == "euclidean") {
    fill([](double, double, double) { return 1.0; });
  } else if (family == "minkowski-quartic") {
    const double c = param_or(params, "c", 0.5);
    if (c <= 0.0) {
      throw ConfigError("minkowski-quartic requires c > 0 for strong convexity");
    }
    fill([c](double, double, double t) {
      const double ct = std::cos(t), st = std::sin(t);
      return std::pow(ct * ct * ct * ct + st * st * st * st + c, 0.25);
    });
  } else if (family == "conformal-torus") {
    const double a = param_or(params, "a", 0.05);
    fill([a](double x1, double x2, double) {
      return std::exp(a * std::cos(x1) * std::cos(x2));
    });
  } else if (family == "randers-torus") {
    const double b1 = param_or(params, "b1", 0.3);
    const double b2 = param_or(params, "b2", 0.0);
    const double mod = param_or(params, "mod", 0.0);
    fill([=](double x1, double x2, double t) {
      const double v1 = b1 + mod * std::cos(x2);
      const double v2 = b2 + mod * std::sin(x1);
      return 1.0 + v1 * std::cos(t) + v2 * std::sin(t);
    });
  }

  double min_phi = 0.0, min_margin = 0.0;
  GridNode worst;
  f.positivity_stats(&min_phi, &min_margin, &worst);
  if (!(min_phi > 0.0) || !(min_margin > 0.0)) {
    std::ostringstream os;
    os << "metric family '" << family << "' is not strongly convex: min phi = "
       << min_phi << ", min (phi + phi_tt) = " << min_margin << " at node "
       << node_str(grid, worst);
    throw DegenerateMetricError(os.str());
  }
  return f;
}

}  // namespace finsler
