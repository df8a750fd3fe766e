#include "finsler/curvature.hpp"

#include <array>
#include <cmath>
#include <span>

namespace finsler {

namespace {

HomogeneousField phi_squared(const FinslerField& f) {
  HomogeneousField f2 = HomogeneousField::scalar(f.phi.grid(), 2);
  auto p = f.phi.component(0);
  auto o = f2.component(0);
  for (std::size_t n = 0; n < p.size(); ++n) o[n] = p[n] * p[n];
  return f2;
}

}  // namespace

SprayField spray(const FinslerField& f, const MetricField& m,
                 const HomogeneousField* d_f2) {
  const GridSpec& grid = f.phi.grid();
  const HomogeneousField f2 = phi_squared(f);
  const HomogeneousField b =
      d_f2 ? *d_f2 : y_derivative(f2);  // dF^2/dy^h, slots [h]

  // c_h = y^j d/dx^j (dF^2/dy^h); d_h = dF^2/dx^h
  HomogeneousField bx1 = x_derivative(b, 1, 1);
  HomogeneousField bx2 = x_derivative(b, 2, 1);
  HomogeneousField d1 = x_derivative(f2, 1, 1);
  HomogeneousField d2 = x_derivative(f2, 2, 1);

  const FiberFrame& fr = fiber_frame(grid);
  const int nt = grid.ntheta;

  SprayField s;
  s.G = HomogeneousField(grid, 2, {Var::Upper});
  std::array<std::span<const double>, 2> dd{d1.component(0), d2.component(0)};
  auto b0x1 = bx1.component(0), b0x2 = bx2.component(0);
  auto b1x1 = bx1.component(1), b1x2 = bx2.component(1);
  for (int i = 0; i < 2; ++i) {
    auto gi0 = m.g_inv.component(HomogeneousField::comp_index(i, 0));
    auto gi1 = m.g_inv.component(HomogeneousField::comp_index(i, 1));
    auto o = s.G.component(i);
    parallel_for(grid.nodes(), [&](std::size_t bgn, std::size_t end) {
      for (std::size_t n = bgn; n < end; ++n) {
        const int it = static_cast<int>(n % nt);
        const double e1 = fr.e(0, it), e2 = fr.e(1, it);
        const double c0 = e1 * b0x1[n] + e2 * b0x2[n];
        const double c1 = e1 * b1x1[n] + e2 * b1x2[n];
        o[n] = 0.25 * (gi0[n] * (c0 - dd[0][n]) + gi1[n] * (c1 - dd[1][n]));
      }
    });
  }
  s.N = y_derivative(s.G);  // slots [j][i]
  return s;
}

HomogeneousField reduced_curvature(const SprayField& s, const FinslerField& f) {
  const GridSpec& grid = s.G.grid();
  const FiberFrame& fr = fiber_frame(grid);
  const int nt = grid.ntheta;

  // t1^i_k = dG^i/dx^k
  HomogeneousField gx1 = x_derivative(s.G, 1, 1);
  HomogeneousField gx2 = x_derivative(s.G, 2, 1);
  // t2^i_k = y^j d/dx^j (N^i_k)
  HomogeneousField nx1 = x_derivative(s.N, 1, 1);
  HomogeneousField nx2 = x_derivative(s.N, 2, 1);
  // nyy[i][k][j] = d^2 G^i / dy^k dy^j
  HomogeneousField nyy = y_derivative(s.N);

  HomogeneousField r(grid, 0, {Var::Upper, Var::Lower});
  auto phi = f.phi.component(0);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      auto o = r.component(HomogeneousField::comp_index(i, k));
      auto t1 = (k == 0 ? gx1 : gx2).component(i);
      auto n_ik_x1 = nx1.component(HomogeneousField::comp_index(i, k));
      auto n_ik_x2 = nx2.component(HomogeneousField::comp_index(i, k));
      auto yy0 = nyy.component(HomogeneousField::comp_index(i, k) * 2 + 0);
      auto yy1 = nyy.component(HomogeneousField::comp_index(i, k) * 2 + 1);
      auto g0 = s.G.component(0);
      auto g1 = s.G.component(1);
      auto n_i0 = s.N.component(HomogeneousField::comp_index(i, 0));
      auto n_i1 = s.N.component(HomogeneousField::comp_index(i, 1));
      auto n_0k = s.N.component(HomogeneousField::comp_index(0, k));
      auto n_1k = s.N.component(HomogeneousField::comp_index(1, k));
      parallel_for(grid.nodes(), [&](std::size_t bgn, std::size_t end) {
        for (std::size_t n = bgn; n < end; ++n) {
          const int it = static_cast<int>(n % nt);
          const double t2 = fr.e(0, it) * n_ik_x1[n] + fr.e(1, it) * n_ik_x2[n];
          const double t3 = 2.0 * (g0[n] * yy0[n] + g1[n] * yy1[n]);
          const double t4 = n_i0[n] * n_0k[n] + n_i1[n] * n_1k[n];
          o[n] = (2.0 * t1[n] - t2 + t3 - t4) / (phi[n] * phi[n]);
        }
      });
    }
  }
  return r;
}

HomogeneousField ricci_scalar(const HomogeneousField& r) {
  return trace(r, 0, 1);
}

HomogeneousField ricci_tensor(const FinslerField& f,
                              const HomogeneousField& ric) {
  const GridSpec& grid = f.phi.grid();
  HomogeneousField h = HomogeneousField::scalar(grid, 2);
  {
    auto p = f.phi.component(0);
    auto rc = ric.component(0);
    auto o = h.component(0);
    for (std::size_t n = 0; n < p.size(); ++n) {
      o[n] = 0.5 * p[n] * p[n] * rc[n];
    }
  }
  HomogeneousField hess = y_derivative(y_derivative(h));
  HomogeneousField out(grid, 0, {Var::Lower, Var::Lower});
  auto h11 = hess.component(0), h12 = hess.component(1),
       h21 = hess.component(2), h22 = hess.component(3);
  auto o11 = out.component(0), o12 = out.component(1), o21 = out.component(2),
       o22 = out.component(3);
  for (std::size_t n = 0; n < h11.size(); ++n) {
    o11[n] = h11[n];
    o22[n] = h22[n];
    o12[n] = 0.5 * (h12[n] + h21[n]);
    o21[n] = o12[n];
  }
  return out;
}

CurvatureBundle curvature_pipeline(const FinslerField& f, const SprayField& s) {
  CurvatureBundle c;
  c.R = reduced_curvature(s, f);
  c.ric_scalar = ricci_scalar(c.R);
  c.ric_tensor = ricci_tensor(f, c.ric_scalar);
  return c;
}

}  // namespace finsler
