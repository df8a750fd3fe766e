#include "finsler/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace finsler {

namespace {

GridNode unflatten(const GridSpec& g, std::size_t n) {
  GridNode node;
  node.itheta = static_cast<int>(n % g.ntheta);
  n /= g.ntheta;
  node.ix2 = static_cast<int>(n % g.nx2);
  node.ix1 = static_cast<int>(n / g.nx2);
  return node;
}

std::string witness_str(const GridSpec& g, const GridNode& node, double t) {
  std::ostringstream os;
  os << "t=" << t << ",ix1=" << node.ix1 << ",ix2=" << node.ix2
     << ",itheta=" << node.itheta;
  (void)g;
  return os.str();
}

// Rebuilds the cached geometry of one snapshot: the stored metric plus the
// Cartan connection derived from the stored phi.
struct SnapshotGeometry {
  FinslerField phi;
  MetricField m;
  SprayField s;
  ConnectionField conn;
};

SnapshotGeometry snapshot_geometry(const Snapshot& snap) {
  SnapshotGeometry sg;
  sg.phi.phi = snap.phi;
  sg.m.g = snap.g;
  sg.m.g_inv = invert_metric(sg.m.g, &sg.m.min_det, &sg.m.worst);
  sg.s = spray(sg.phi, sg.m);
  sg.conn = cartan_horizontal_coefficients(sg.m, sg.s.N);
  return sg;
}

}  // namespace

HomogeneousField tensor_norm_field(const HomogeneousField& f,
                                   const MetricField& m) {
  const GridSpec& grid = f.grid();
  const int rank = f.rank();
  const int comps = f.components();
  if (rank > 4) throw ConfigError("tensor_norm_field: rank too large");
  if (!(m.g.grid() == grid)) {
    throw ConfigError("tensor_norm_field: tensor and metric grids do not match");
  }

  // per-pair index tables into the node-local buffer [g00,g01,g10,g11,
  // gi00,gi01,gi10,gi11]; slot variance picks the half
  struct Pair {
    int a, b;
    int idx[4];
    int nfac;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(comps) * comps);
  for (int a = 0; a < comps; ++a) {
    for (int b = 0; b < comps; ++b) {
      Pair p{a, b, {0, 0, 0, 0}, rank};
      for (int s = 0; s < rank; ++s) {
        const int ia = (a >> (rank - 1 - s)) & 1;
        const int ib = (b >> (rank - 1 - s)) & 1;
        const int base = f.variance()[s] == Var::Upper ? 0 : 4;
        p.idx[s] = base + ia * 2 + ib;
      }
      pairs.push_back(p);
    }
  }

  HomogeneousField out = HomogeneousField::scalar(grid, 0);
  auto o = out.component(0);
  auto g01 = m.g.component(1), g00 = m.g.component(0), g11 = m.g.component(3);
  auto gi01 = m.g_inv.component(1), gi00 = m.g_inv.component(0),
       gi11 = m.g_inv.component(3);
  parallel_for(grid.nodes(), [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) {
      double buf[8];
      buf[0] = g00[n];
      buf[1] = buf[2] = g01[n];
      buf[3] = g11[n];
      buf[4] = gi00[n];
      buf[5] = buf[6] = gi01[n];
      buf[7] = gi11[n];
      double total = 0.0;
      for (const Pair& p : pairs) {
        double factor = f.component(p.a)[n] * f.component(p.b)[n];
        for (int s = 0; s < p.nfac; ++s) factor *= buf[p.idx[s]];
        total += factor;
      }
      o[n] = std::sqrt(std::max(total, 0.0));
    }
  });
  return out;
}

SupResult tensor_norm_sup(const HomogeneousField& f, const MetricField& m) {
  const HomogeneousField nf = tensor_norm_field(f, m);
  auto v = nf.component(0);
  SupResult r;
  std::size_t at = 0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (v[n] > r.sup) {
      r.sup = v[n];
      at = n;
    }
  }
  r.worst = unflatten(f.grid(), at);
  return r;
}

NormSeries norm_series(const FlowRun& run) {
  if (run.snapshots.empty()) throw ConfigError("norm_series: run has no snapshots");
  NormSeries s;
  const SnapshotGeometry base = snapshot_geometry(run.snapshots.front());

  for (const Snapshot& snap : run.snapshots) {
    const SnapshotGeometry cur = snapshot_geometry(snap);
    const HomogeneousField nabla_w =
        horizontal_covariant_derivative_02(snap.omega, cur.conn);
    const HomogeneousField d_w =
        horizontal_covariant_derivative_02(snap.omega, base.conn);
    s.t.push_back(snap.t);
    s.u0.push_back(tensor_norm_sup(snap.omega, cur.m).sup);
    s.u1.push_back(tensor_norm_sup(nabla_w, cur.m).sup);
    s.uhat0.push_back(tensor_norm_sup(snap.omega, base.m).sup);
    s.uhat1.push_back(tensor_norm_sup(d_w, base.m).sup);
  }

  auto integrate = [&](const std::vector<double>& f) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
      out[k + 1] = out[k] + 0.5 * (s.t[k + 1] - s.t[k]) * (f[k] + f[k + 1]);
    }
    return out;
  };
  s.int_u0 = integrate(s.u0);
  s.int_u1 = integrate(s.u1);
  s.int_uhat0 = integrate(s.uhat0);
  s.int_uhat1 = integrate(s.uhat1);
  return s;
}

std::array<double, 2> pencil_eigenvalues(double a11, double a12, double a22,
                                         double b11, double b12, double b22) {
  const double det_b = b11 * b22 - b12 * b12;
  const double det_a = a11 * a22 - a12 * a12;
  const double p = a11 * b22 + a22 * b11 - 2.0 * a12 * b12;
  const double disc = std::sqrt(std::max(0.0, p * p - 4.0 * det_b * det_a));
  return {(p - disc) / (2.0 * det_b), (p + disc) / (2.0 * det_b)};
}

Certificate uniform_equivalence_certificate(const FlowRun& run, double tol) {
  Certificate cert;
  cert.name = "uniform-equivalence";
  cert.tolerance = tol;
  if (run.snapshots.empty()) {
    cert.pass = false;
    cert.residual = std::nan("");
    cert.witness = "no snapshots";
    return cert;
  }
  const Snapshot& base = run.snapshots.front();
  auto b11 = base.g.component(0), b12 = base.g.component(1),
       b22 = base.g.component(3);

  double worst = -std::numeric_limits<double>::infinity();
  GridNode worst_node;
  double worst_t = 0.0;
  for (const Snapshot& snap : run.snapshots) {
    const double lo = std::exp(-snap.int_u0);
    const double hi = std::exp(snap.int_u0);
    auto a11 = snap.g.component(0), a12 = snap.g.component(1),
         a22 = snap.g.component(3);
    for (std::size_t n = 0; n < a11.size(); ++n) {
      const auto ev = pencil_eigenvalues(a11[n], a12[n], a22[n], b11[n],
                                         b12[n], b22[n]);
      const double violation = std::max(lo - ev[0], ev[1] - hi);
      if (violation > worst) {
        worst = violation;
        worst_node = unflatten(run.grid, n);
        worst_t = snap.t;
      }
    }
  }
  cert.residual = worst;
  cert.pass = worst <= tol;
  cert.witness = witness_str(run.grid, worst_node, worst_t);
  return cert;
}

HomogeneousField gamma_difference(const MetricField& g_t,
                                  const ConnectionField& conn_t,
                                  const ConnectionField& conn_0,
                                  double* coefficient_diff_residual) {
  const GridSpec& grid = g_t.g.grid();
  const HomogeneousField dg = horizontal_covariant_derivative_02(g_t.g, conn_0);

  HomogeneousField gamma(grid, 0, {Var::Upper, Var::Lower, Var::Lower});
  auto dgc = [&](int dir, int i, int j) {
    return dg.component((dir * 2 + i) * 2 + j);
  };
  for (int jj = 0; jj < 2; ++jj) {
    for (int kk = jj; kk < 2; ++kk) {
      for (int i = 0; i < 2; ++i) {
        auto gi0 = g_t.g_inv.component(HomogeneousField::comp_index(i, 0));
        auto gi1 = g_t.g_inv.component(HomogeneousField::comp_index(i, 1));
        auto o = gamma.component(HomogeneousField::comp_index(i, jj, kk));
        auto a0 = dgc(jj, kk, 0), a1 = dgc(jj, kk, 1);
        auto b0 = dgc(kk, jj, 0), b1 = dgc(kk, jj, 1);
        auto c0 = dgc(0, jj, kk), c1 = dgc(1, jj, kk);
        for (std::size_t n = 0; n < o.size(); ++n) {
          const double s0 = a0[n] + b0[n] - c0[n];
          const double s1 = a1[n] + b1[n] - c1[n];
          o[n] = 0.5 * (gi0[n] * s0 + gi1[n] * s1);
        }
        if (kk != jj) {
          auto osym = gamma.component(HomogeneousField::comp_index(i, kk, jj));
          std::copy(o.begin(), o.end(), osym.begin());
        }
      }
    }
  }

  if (coefficient_diff_residual) {
    HomogeneousField diff = conn_t.gamma;
    diff.axpy(-1.0, conn_0.gamma);
    *coefficient_diff_residual = gamma.max_abs_diff(diff);
  }
  return gamma;
}

double commutation_residual_at(const FlowRun& run, int snapshot_index) {
  const Snapshot& snap = run.snapshots.at(snapshot_index);
  const SnapshotGeometry base = snapshot_geometry(run.snapshots.front());
  const SnapshotGeometry cur = snapshot_geometry(snap);
  const HomogeneousField& omega = snap.omega;

  HomogeneousField lhs = horizontal_covariant_derivative_02(omega, cur.conn);
  lhs.axpy(-1.0, horizontal_covariant_derivative_02(omega, base.conn));

  const HomogeneousField gamma = gamma_difference(cur.m, cur.conn, base.conn);

  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        auto l = lhs.component((k * 2 + i) * 2 + j);
        auto gm0i = gamma.component(HomogeneousField::comp_index(0, k, i));
        auto gm1i = gamma.component(HomogeneousField::comp_index(1, k, i));
        auto gm0j = gamma.component(HomogeneousField::comp_index(0, k, j));
        auto gm1j = gamma.component(HomogeneousField::comp_index(1, k, j));
        auto w0j = omega.component(HomogeneousField::comp_index(0, j));
        auto w1j = omega.component(HomogeneousField::comp_index(1, j));
        auto wi0 = omega.component(HomogeneousField::comp_index(i, 0));
        auto wi1 = omega.component(HomogeneousField::comp_index(i, 1));
        for (std::size_t n = 0; n < l.size(); ++n) {
          const double rhs = -(gm0i[n] * w0j[n] + gm1i[n] * w1j[n]) -
                             (gm0j[n] * wi0[n] + gm1j[n] * wi1[n]);
          worst = std::max(worst, std::abs(l[n] - rhs));
        }
      }
    }
  }
  return worst;
}

Certificate gamma_difference_certificate(const FlowRun& run, double tol) {
  Certificate cert;
  cert.name = "gamma-difference";
  cert.tolerance = tol;
  const SnapshotGeometry base = snapshot_geometry(run.snapshots.front());
  double worst = 0.0;
  double worst_t = 0.0;
  for (const Snapshot& snap : run.snapshots) {
    const SnapshotGeometry cur = snapshot_geometry(snap);
    double coeff_res = 0.0;
    gamma_difference(cur.m, cur.conn, base.conn, &coeff_res);
    if (coeff_res > worst) {
      worst = coeff_res;
      worst_t = snap.t;
    }
  }
  cert.residual = worst;
  cert.pass = worst <= tol;
  cert.witness = witness_str(run.grid, GridNode{}, worst_t);
  return cert;
}

Certificate commutation_certificate(const FlowRun& run, double tol) {
  Certificate cert;
  cert.name = "commutation-m1";
  cert.tolerance = tol;
  double worst = 0.0;
  double worst_t = 0.0;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const double r = commutation_residual_at(run, static_cast<int>(k));
    if (r > worst) {
      worst = r;
      worst_t = run.snapshots[k].t;
    }
  }
  cert.residual = worst;
  cert.pass = worst <= tol;
  cert.witness = witness_str(run.grid, GridNode{}, worst_t);
  return cert;
}

Certificate cauchy_tail_certificate(const FlowRun& run, const LimitMetric& lim,
                                    double tol) {
  Certificate cert;
  cert.name = "cauchy-tail";
  cert.tolerance = tol;

  const NormSeries series = norm_series(run);
  const SnapshotGeometry base = snapshot_geometry(run.snapshots.front());
  const double total = series.int_uhat0.back();

  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    HomogeneousField diff = run.snapshots[k].g;
    diff.axpy(-1.0, lim.gbar);
    const double lhs = tensor_norm_sup(diff, base.m).sup;
    const double tail = total - series.int_uhat0[k];
    if (lhs - tail > worst) {
      worst = lhs - tail;
      worst_t = run.snapshots[k].t;
    }
  }
  cert.residual = worst;
  cert.pass = worst <= tol;
  cert.witness = witness_str(run.grid, GridNode{}, worst_t);
  return cert;
}

Certificate limit_positive_definite_certificate(const LimitMetric& lim) {
  Certificate cert;
  cert.name = "limit-positive-definite";
  cert.tolerance = 0.0;
  cert.pass = lim.positive_definite;
  // pass iff residual <= tolerance, so a failing certificate must report a
  // strictly positive residual even at min det == 0
  cert.residual = lim.positive_definite
                      ? -lim.min_det
                      : std::max(std::abs(lim.min_det),
                                 std::numeric_limits<double>::min());
  std::ostringstream os;
  os << "min det gbar=" << lim.min_det << " at ix1=" << lim.worst.ix1
     << ",ix2=" << lim.worst.ix2 << ",itheta=" << lim.worst.itheta;
  cert.witness = os.str();
  return cert;
}

Certificate fbar_hessian_certificate(const LimitMetric& lim, double tol) {
  Certificate cert;
  cert.name = "fbar-hessian";
  cert.tolerance = tol;
  cert.residual = lim.hessian_residual;
  cert.pass = std::isfinite(lim.hessian_residual) && lim.hessian_residual <= tol;
  cert.witness = "limit metric reconstruction";
  return cert;
}

std::vector<Certificate> verify_certificates(const FlowRun& run, double tol,
                                             double fbar_tol) {
  const LimitMetric lim = limit_metric(run);
  std::vector<Certificate> certs;
  certs.push_back(uniform_equivalence_certificate(run, tol));
  certs.push_back(gamma_difference_certificate(run, tol));
  certs.push_back(commutation_certificate(run, tol));
  certs.push_back(limit_positive_definite_certificate(lim));
  certs.push_back(cauchy_tail_certificate(run, lim, tol));
  certs.push_back(fbar_hessian_certificate(lim, fbar_tol));
  return certs;
}

}  // namespace finsler
