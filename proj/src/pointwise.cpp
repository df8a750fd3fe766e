#include "finsler/pointwise.hpp"

#include <cmath>

#include "finsler/vertical.hpp"

namespace finsler {

namespace {

// Samples on a local (2*half+1)^2 x-stencil times the fiber circle.
// x offsets run -half..half relative to the query point.
struct LocalField {
  int half = 0;
  int ntheta = 0;
  std::vector<double> v;

  LocalField() = default;
  LocalField(int half_, int ntheta_)
      : half(half_), ntheta(ntheta_),
        v(static_cast<std::size_t>(2 * half_ + 1) * (2 * half_ + 1) * ntheta_,
          0.0) {}

  double* line(int di, int dj) {
    const int w = 2 * half + 1;
    return v.data() +
           (static_cast<std::size_t>(di + half) * w + (dj + half)) * ntheta;
  }
  const double* line(int di, int dj) const {
    return const_cast<LocalField*>(this)->line(di, dj);
  }
};

LocalField theta_deriv(const LocalField& f, int order) {
  LocalField out(f.half, f.ntheta);
  const auto mat = theta_diff_matrix(f.ntheta, order);
  for (int di = -f.half; di <= f.half; ++di) {
    for (int dj = -f.half; dj <= f.half; ++dj) {
      const double* in = f.line(di, dj);
      double* o = out.line(di, dj);
      for (int i = 0; i < f.ntheta; ++i) {
        const double* row = mat.data() + static_cast<std::size_t>(i) * f.ntheta;
        double s = 0.0;
        for (int j = 0; j < f.ntheta; ++j) s += row[j] * in[j];
        o[i] = s;
      }
    }
  }
  return out;
}

// d/dy^i via the Euler form; components returned separately.
std::array<LocalField, 2> y_deriv(const LocalField& f, int degree) {
  const LocalField ft = theta_deriv(f, 1);
  const FiberFrame& fr = fiber_frame(f.ntheta);
  std::array<LocalField, 2> out{LocalField(f.half, f.ntheta),
                                LocalField(f.half, f.ntheta)};
  for (int axis = 0; axis < 2; ++axis) {
    for (int di = -f.half; di <= f.half; ++di) {
      for (int dj = -f.half; dj <= f.half; ++dj) {
        const double* psi = f.line(di, dj);
        const double* psit = ft.line(di, dj);
        double* o = out[axis].line(di, dj);
        for (int k = 0; k < f.ntheta; ++k) {
          o[k] = degree * psi[k] * fr.e(axis, k) + psit[k] * fr.m(axis, k);
        }
      }
    }
  }
  return out;
}

// 4th-order central x-derivative; output extent shrinks by two cells.
LocalField x_deriv(const LocalField& f, int axis, double eps) {
  LocalField out(f.half - 2, f.ntheta);
  const double s = 1.0 / (12.0 * eps);
  for (int di = -out.half; di <= out.half; ++di) {
    for (int dj = -out.half; dj <= out.half; ++dj) {
      const double* m2 = (axis == 1) ? f.line(di - 2, dj) : f.line(di, dj - 2);
      const double* m1 = (axis == 1) ? f.line(di - 1, dj) : f.line(di, dj - 1);
      const double* p1 = (axis == 1) ? f.line(di + 1, dj) : f.line(di, dj + 1);
      const double* p2 = (axis == 1) ? f.line(di + 2, dj) : f.line(di, dj + 2);
      double* o = out.line(di, dj);
      for (int k = 0; k < f.ntheta; ++k) {
        o[k] = s * (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]);
      }
    }
  }
  return out;
}

LocalField shrink(const LocalField& f, int half) {
  LocalField out(half, f.ntheta);
  for (int di = -half; di <= half; ++di) {
    for (int dj = -half; dj <= half; ++dj) {
      const double* in = f.line(di, dj);
      double* o = out.line(di, dj);
      std::copy(in, in + f.ntheta, o);
    }
  }
  return out;
}

}  // namespace

PointwiseCurvature pointwise_curvature(const ChartMetric& phi_fn,
                                       std::array<double, 2> x0, int ntheta,
                                       double eps) {
  if (ntheta < 8 || ntheta % 2 != 0) {
    throw ConfigError("pointwise_curvature: ntheta must be even and >= 8");
  }
  const int outer = 4;  // two nested 4th-order x-derivative levels
  const FiberFrame& fr = fiber_frame(ntheta);
  const double ht = kTwoPi / ntheta;

  LocalField phi(outer, ntheta);
  for (int di = -outer; di <= outer; ++di) {
    for (int dj = -outer; dj <= outer; ++dj) {
      double* o = phi.line(di, dj);
      for (int k = 0; k < ntheta; ++k) {
        o[k] = phi_fn(x0[0] + eps * di, x0[1] + eps * dj, ht * k);
      }
    }
  }

  LocalField f2(outer, ntheta);
  for (std::size_t n = 0; n < phi.v.size(); ++n) f2.v[n] = phi.v[n] * phi.v[n];

  // metric and inverse on the full stencil (theta-only operations)
  const auto b = y_deriv(f2, 2);  // dF^2/dy^h
  const auto g_row0 = y_deriv(b[0], 1);
  const auto g_row1 = y_deriv(b[1], 1);
  LocalField g11(outer, ntheta), g12(outer, ntheta), g22(outer, ntheta);
  LocalField gi11(outer, ntheta), gi12(outer, ntheta), gi22(outer, ntheta);
  for (std::size_t n = 0; n < g11.v.size(); ++n) {
    g11.v[n] = 0.5 * g_row0[0].v[n];
    g22.v[n] = 0.5 * g_row1[1].v[n];
    g12.v[n] = 0.25 * (g_row0[1].v[n] + g_row1[0].v[n]);
    const double det = g11.v[n] * g22.v[n] - g12.v[n] * g12.v[n];
    gi11.v[n] = g22.v[n] / det;
    gi22.v[n] = g11.v[n] / det;
    gi12.v[n] = -g12.v[n] / det;
  }

  // spray on the inner 5x5 stencil
  const LocalField b0x1 = x_deriv(b[0], 1, eps), b0x2 = x_deriv(b[0], 2, eps);
  const LocalField b1x1 = x_deriv(b[1], 1, eps), b1x2 = x_deriv(b[1], 2, eps);
  const LocalField d1 = x_deriv(f2, 1, eps), d2 = x_deriv(f2, 2, eps);
  const int inner = outer - 2;
  const LocalField sgi11 = shrink(gi11, inner), sgi12 = shrink(gi12, inner),
                   sgi22 = shrink(gi22, inner);
  std::array<LocalField, 2> G{LocalField(inner, ntheta),
                              LocalField(inner, ntheta)};
  for (int di = -inner; di <= inner; ++di) {
    for (int dj = -inner; dj <= inner; ++dj) {
      for (int k = 0; k < ntheta; ++k) {
        const double e1 = fr.e(0, k), e2 = fr.e(1, k);
        const std::size_t off =
            (static_cast<std::size_t>(di + inner) * (2 * inner + 1) +
             (dj + inner)) *
            ntheta +
            k;
        const double c0 = e1 * b0x1.line(di, dj)[k] + e2 * b0x2.line(di, dj)[k];
        const double c1 = e1 * b1x1.line(di, dj)[k] + e2 * b1x2.line(di, dj)[k];
        const double r0 = c0 - d1.line(di, dj)[k];
        const double r1 = c1 - d2.line(di, dj)[k];
        G[0].v[off] = 0.25 * (sgi11.line(di, dj)[k] * r0 +
                              sgi12.line(di, dj)[k] * r1);
        G[1].v[off] = 0.25 * (sgi12.line(di, dj)[k] * r0 +
                              sgi22.line(di, dj)[k] * r1);
      }
    }
  }

  // nonlinear connection on the inner stencil
  const auto n0 = y_deriv(G[0], 2);  // N^0_i
  const auto n1 = y_deriv(G[1], 2);  // N^1_i

  // assemble R^i_k at the center only
  PointwiseCurvature out;
  out.ntheta = ntheta;
  out.phi.assign(phi.line(0, 0), phi.line(0, 0) + ntheta);
  out.det_g.resize(ntheta);
  for (int k = 0; k < ntheta; ++k) {
    out.det_g[k] = g11.line(0, 0)[k] * g22.line(0, 0)[k] -
                   g12.line(0, 0)[k] * g12.line(0, 0)[k];
  }
  out.spray_g[0].assign(G[0].line(0, 0), G[0].line(0, 0) + ntheta);
  out.spray_g[1].assign(G[1].line(0, 0), G[1].line(0, 0) + ntheta);

  const std::array<const LocalField*, 2> Gp{&G[0], &G[1]};
  const std::array<std::array<const LocalField*, 2>, 2> N{
      {{&n0[0], &n0[1]}, {&n1[0], &n1[1]}}};

  std::array<std::array<std::vector<double>, 2>, 2> r_val;
  for (int i = 0; i < 2; ++i) {
    const LocalField gx1 = x_deriv(*Gp[i], 1, eps);
    const LocalField gx2 = x_deriv(*Gp[i], 2, eps);
    for (int k = 0; k < 2; ++k) {
      const LocalField nx1 = x_deriv(*N[i][k], 1, eps);
      const LocalField nx2 = x_deriv(*N[i][k], 2, eps);
      const auto nyy = y_deriv(*N[i][k], 1);  // d^2G^i/dy^k dy^j
      r_val[i][k].resize(ntheta);
      for (int t = 0; t < ntheta; ++t) {
        const double e1 = fr.e(0, t), e2 = fr.e(1, t);
        const double t1 = (k == 0 ? gx1 : gx2).line(0, 0)[t];
        const double t2 = e1 * nx1.line(0, 0)[t] + e2 * nx2.line(0, 0)[t];
        const double t3 = 2.0 * (Gp[0]->line(0, 0)[t] * nyy[0].line(0, 0)[t] +
                                 Gp[1]->line(0, 0)[t] * nyy[1].line(0, 0)[t]);
        const double t4 = N[i][0]->line(0, 0)[t] * N[0][k]->line(0, 0)[t] +
                          N[i][1]->line(0, 0)[t] * N[1][k]->line(0, 0)[t];
        const double p = out.phi[t];
        r_val[i][k][t] = (2.0 * t1 - t2 + t3 - t4) / (p * p);
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) out.r[i * 2 + k] = r_val[i][k];
  }
  out.ric.resize(ntheta);
  for (int t = 0; t < ntheta; ++t) out.ric[t] = r_val[0][0][t] + r_val[1][1][t];

  // Akbar-Zadeh tensor from the theta line at the center
  LocalField h(0, ntheta);
  for (int t = 0; t < ntheta; ++t) {
    h.v[t] = 0.5 * out.phi[t] * out.phi[t] * out.ric[t];
  }
  const auto hy = y_deriv(h, 2);
  const auto h0 = y_deriv(hy[0], 1);
  const auto h1 = y_deriv(hy[1], 1);
  out.ric_tensor[0].assign(h0[0].v.begin(), h0[0].v.end());
  out.ric_tensor[3].assign(h1[1].v.begin(), h1[1].v.end());
  out.ric_tensor[1].resize(ntheta);
  for (int t = 0; t < ntheta; ++t) {
    out.ric_tensor[1][t] = 0.5 * (h0[1].v[t] + h1[0].v[t]);
  }
  out.ric_tensor[2] = out.ric_tensor[1];
  return out;
}

ChartMetric make_chart_metric(const std::string& family) {
  if (family == "funk-disk") {
    return [](double x1, double x2, double t) {
      const double y1 = std::cos(t), y2 = std::sin(t);
      const double xx = x1 * x1 + x2 * x2;
      const double xy = x1 * y1 + x2 * y2;
      return (std::sqrt(xy * xy + (1.0 - xx)) + xy) / (1.0 - xx);
    };
  }
  if (family == "sphere-chart") {
    return [](double x1, double x2, double) {
      return 2.0 / (1.0 + x1 * x1 + x2 * x2);
    };
  }
  throw ConfigError("no chart metric for family '" + family + "'");
}

}  // namespace finsler
