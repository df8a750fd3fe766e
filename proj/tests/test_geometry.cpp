#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/curvature.hpp"
#include "finsler/geometry.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

std::size_t node_of(const GridSpec& g, int i, int j, int k) {
  return (static_cast<std::size_t>(i) * g.nx2 + j) * g.ntheta + k;
}

}  // namespace

TEST_CASE("euclidean fundamental tensor is the identity") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f = make_zoo_metric(g, "euclidean", {});
  auto m = fundamental_tensor(f);
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    CHECK(m.g.component(0)[n] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m.g.component(3)[n] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(m.g.component(1)[n]) < 1e-13);
  }
}

TEST_CASE("conformal riemannian fundamental tensor is e^{2u} delta") {
  const GridSpec g = GridSpec::make(16, 16, 16);
  const double a = 0.3;
  auto f = make_zoo_metric(g, "conformal-torus", {{"a", a}});
  auto m = fundamental_tensor(f);
  for (int i = 0; i < g.nx1; i += 3) {
    for (int j = 0; j < g.nx2; j += 3) {
      const double e2u = std::exp(2.0 * oracles::conformal_u(a, g.x1(i), g.x2(j)));
      const std::size_t n = node_of(g, i, j, 5);
      CHECK(m.g.component(0)[n] == doctest::Approx(e2u).epsilon(1e-12));
      CHECK(m.g.component(3)[n] == doctest::Approx(e2u).epsilon(1e-12));
      CHECK(std::abs(m.g.component(1)[n]) < 1e-12);
    }
  }
}

TEST_CASE("randers determinant matches the 2d closed form") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  auto f = make_zoo_metric(g, "randers-torus", {{"b1", 0.3}, {"b2", 0.0}});
  auto m = fundamental_tensor(f);
  // at theta = 0: det g = phi^3 (phi + phi_tt) = 1.3^3 * 1 = 2.197
  const std::size_t n0 = node_of(g, 2, 3, 0);
  const double det = m.g.component(0)[n0] * m.g.component(3)[n0] -
                     m.g.component(1)[n0] * m.g.component(1)[n0];
  CHECK(det == doctest::Approx(2.197).epsilon(1e-10));

  // the det identity itself at every node, against phi and its margin
  auto margin = f.convexity_margin();
  for (std::size_t n = 0; n < g.nodes(); n += 11) {
    const double phi = f.phi.component(0)[n];
    const double expect = phi * phi * phi * margin.component(0)[n];
    const double d = m.g.component(0)[n] * m.g.component(3)[n] -
                     m.g.component(1)[n] * m.g.component(1)[n];
    CHECK(d == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("2d determinant identity verified against an ambient hessian") {
  // brute-force check of det g = phi^3 (phi + phi_tt) for a randers profile
  const double b1 = 0.3, b2 = 0.1;
  oracles::Ambient F = [=](double, double, double y1, double y2) {
    return std::sqrt(y1 * y1 + y2 * y2) + b1 * y1 + b2 * y2;
  };
  for (double t : {0.0, 0.7, 2.1, 4.4}) {
    const oracles::Vec2 y{std::cos(t), std::sin(t)};
    const auto g = oracles::ambient_metric(F, {0.0, 0.0}, y, 1e-3);
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    const double phi = 1.0 + b1 * std::cos(t) + b2 * std::sin(t);
    // for euclidean-alpha randers, phi + phi_tt = 1
    CHECK(det == doctest::Approx(phi * phi * phi).epsilon(1e-7));
  }
}

TEST_CASE("degenerate metric reports the worst node") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  CHECK_THROWS_AS(make_zoo_metric(g, "randers-torus", {{"b1", 1.1}}),
                  DegenerateMetricError);
  try {
    make_zoo_metric(g, "randers-torus", {{"b1", 1.1}});
  } catch (const DegenerateMetricError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node") != std::string::npos);
    CHECK(msg.find("min phi") != std::string::npos);
  }
}

TEST_CASE("euler contraction g_ij y^i y^j = F^2") {
  const GridSpec g = GridSpec::make(16, 16, 64);
  for (const char* family : {"euclidean", "minkowski-quartic", "conformal-torus",
                             "randers-torus"}) {
    auto f = make_zoo_metric(g, family, {});
    auto m = fundamental_tensor(f);
    const FiberFrame& fr = fiber_frame(g);
    double worst = 0.0;
    for (std::size_t n = 0; n < g.nodes(); ++n) {
      const int k = static_cast<int>(n % g.ntheta);
      const double e1 = fr.e(0, k), e2 = fr.e(1, k);
      const double q = m.g.component(0)[n] * e1 * e1 +
                       2.0 * m.g.component(1)[n] * e1 * e2 +
                       m.g.component(3)[n] * e2 * e2;
      const double phi2 = f.phi.component(0)[n] * f.phi.component(0)[n];
      worst = std::max(worst, std::abs(q - phi2) / phi2);
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("ell identity g^{ij} l_i l_j = 1") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  auto f = make_zoo_metric(g, "randers-torus", {{"b1", 0.2}, {"b2", 0.1}});
  auto m = fundamental_tensor(f);
  auto ell = y_derivative(f.phi);
  double worst = 0.0;
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    const double l0 = ell.component(0)[n], l1 = ell.component(1)[n];
    const double q = m.g_inv.component(0)[n] * l0 * l0 +
                     2.0 * m.g_inv.component(1)[n] * l0 * l1 +
                     m.g_inv.component(3)[n] * l1 * l1;
    worst = std::max(worst, std::abs(q - 1.0));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("fundamental tensor is 2-homogeneous in F") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f = make_zoo_metric(g, "minkowski-quartic", {{"c", 0.7}});
  auto m = fundamental_tensor(f);
  const double lambda = 1.75;
  FinslerField scaled = f;
  scaled.phi *= lambda;
  auto ms = fundamental_tensor(scaled);
  HomogeneousField expect = m.g;
  expect *= lambda * lambda;
  CHECK(ms.g.max_abs_diff(expect) < 1e-12);
}

TEST_CASE("cartan coefficients vanish for x-independent metrics") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  for (const char* family : {"euclidean", "minkowski-quartic"}) {
    auto f = make_zoo_metric(g, family, {});
    auto m = fundamental_tensor(f);
    auto s = spray(f, m);
    CHECK(s.G.max_abs() < 1e-12);
    auto conn = cartan_horizontal_coefficients(m, s.N);
    CHECK(conn.gamma.max_abs() < 1e-12);
  }
}

TEST_CASE("cartan coefficients reduce to christoffels for conformal metrics") {
  const GridSpec g = GridSpec::make(64, 64, 16);
  const double a = 0.05;
  auto f = make_zoo_metric(g, "conformal-torus", {{"a", a}});
  auto m = fundamental_tensor(f);
  auto s = spray(f, m);
  auto conn = cartan_horizontal_coefficients(m, s.N);
  double worst = 0.0;
  for (int i = 0; i < g.nx1; i += 5) {
    for (int j = 0; j < g.nx2; j += 5) {
      const auto gamma = oracles::conformal_christoffel(a, g.x1(i), g.x2(j));
      const std::size_t n = node_of(g, i, j, 3);
      for (int ii = 0; ii < 2; ++ii) {
        for (int jj = 0; jj < 2; ++jj) {
          for (int kk = 0; kk < 2; ++kk) {
            const double got =
                conn.gamma.component(HomogeneousField::comp_index(ii, jj, kk))[n];
            worst = std::max(worst, std::abs(got - gamma[ii][jj][kk]));
          }
        }
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("metric compatibility: covariant derivative of g vanishes") {
  const GridSpec g = GridSpec::make(16, 16, 32);
  for (const char* family : {"conformal-torus", "randers-torus"}) {
    MetricParams params;
    if (std::string(family) == "randers-torus") {
      params = {{"b1", 0.2}, {"b2", 0.0}, {"mod", 0.1}};
    } else {
      params = {{"a", 0.2}};
    }
    auto f = make_zoo_metric(g, family, params);
    auto m = fundamental_tensor(f);
    auto s = spray(f, m);
    auto conn = cartan_horizontal_coefficients(m, s.N);
    auto nabla_g = horizontal_covariant_derivative_02(m.g, conn);
    CHECK(nabla_g.max_abs() < 1e-8);
  }
}

TEST_CASE("covariant derivative of a constant tensor on the flat metric") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto f = make_zoo_metric(g, "euclidean", {});
  auto m = fundamental_tensor(f);
  auto s = spray(f, m);
  auto conn = cartan_horizontal_coefficients(m, s.N);
  HomogeneousField t(g, 0, {Var::Lower, Var::Lower});
  for (int c = 0; c < 4; ++c) {
    auto comp = t.component(c);
    std::fill(comp.begin(), comp.end(), 1.0 + c);
  }
  CHECK(horizontal_covariant_derivative_02(t, conn).max_abs() < 1e-13);
}

TEST_CASE("covariant derivative self-converges under refinement") {
  const double a = 0.05;
  auto eval = [&](int n) {
    const GridSpec g = GridSpec::make(n, n, 16);
    auto f = make_zoo_metric(g, "conformal-torus", {{"a", a}});
    auto m = fundamental_tensor(f);
    auto s = spray(f, m);
    auto conn = cartan_horizontal_coefficients(m, s.N);
    auto c = curvature_pipeline(f, s);
    auto d = horizontal_covariant_derivative_02(c.ric_tensor, conn);
    // probe (nabla_1 Ric)_11 at the common node x = (pi/4, pi/4), theta = 0
    return d.component(0)[node_of(g, n / 8, n / 8, 0)];
  };
  const double coarse = eval(32);
  const double mid = eval(64);
  const double fine = eval(128);
  // dense-stencil reference: richardson of the two coarser evaluations
  const double extrapolated = (16.0 * mid - coarse) / 15.0;
  CHECK(std::abs(extrapolated - fine) < 1e-6);
  CHECK(std::abs(coarse - fine) > 8.0 * std::abs(mid - fine));
}

TEST_CASE("zoo rejects unknown families and parameters") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  CHECK_THROWS_AS(make_zoo_metric(g, "nope", {}), ConfigError);
  CHECK_THROWS_AS(make_zoo_metric(g, "conformal-torus", {{"zz", 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(make_zoo_metric(g, "funk-disk", {}), ConfigError);
  CHECK(is_pointwise_family("funk-disk"));
  CHECK(is_pointwise_family("sphere-chart"));
  CHECK(is_grid_family("randers-torus"));
}
