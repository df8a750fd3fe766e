#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/vertical.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

HomogeneousField theta_profile(const GridSpec& g, int degree,
                               double (*fn)(double)) {
  auto f = HomogeneousField::scalar(g, degree);
  auto out = f.component(0);
  for (int i = 0; i < g.nx1; ++i) {
    for (int j = 0; j < g.nx2; ++j) {
      for (int k = 0; k < g.ntheta; ++k) {
        out[(static_cast<std::size_t>(i) * g.nx2 + j) * g.ntheta + k] =
            fn(g.theta(k));
      }
    }
  }
  return f;
}

HomogeneousField x_profile(const GridSpec& g, double (*fn)(double, double)) {
  auto f = HomogeneousField::scalar(g, 0);
  auto out = f.component(0);
  for (int i = 0; i < g.nx1; ++i) {
    for (int j = 0; j < g.nx2; ++j) {
      for (int k = 0; k < g.ntheta; ++k) {
        out[(static_cast<std::size_t>(i) * g.nx2 + j) * g.ntheta + k] =
            fn(g.x1(i), g.x2(j));
      }
    }
  }
  return f;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(GridSpec::make(8, 8, 8));
  CHECK_THROWS_AS(GridSpec::make(4, 8, 8), ConfigError);
  CHECK_THROWS_AS(GridSpec::make(8, 8, 9), ConfigError);
  const GridSpec g = GridSpec::make(16, 32, 64);
  CHECK(g.hx1() == kTwoPi / 16);
  CHECK(g.hx2() == kTwoPi / 32);
  CHECK(g.htheta() == kTwoPi / 64);
}

TEST_CASE("fiber frame orthonormality") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  const FiberFrame& fr = fiber_frame(g);
  for (int k = 0; k < g.ntheta; ++k) {
    const double ee = fr.e(0, k) * fr.e(0, k) + fr.e(1, k) * fr.e(1, k);
    const double mm = fr.m(0, k) * fr.m(0, k) + fr.m(1, k) * fr.m(1, k);
    const double em = fr.e(0, k) * fr.m(0, k) + fr.e(1, k) * fr.m(1, k);
    CHECK(ee == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mm == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(em == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("theta derivative of cos is -sin") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  auto f = theta_profile(g, 0, [](double t) { return std::cos(t); });
  auto d = theta_derivative(f, 1);
  auto expect = theta_profile(g, 0, [](double t) { return -std::sin(t); });
  CHECK(d.max_abs_diff(expect) < 1e-12);
}

TEST_CASE("theta derivative of a constant vanishes") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f = theta_profile(g, 0, [](double) { return 1.0; });
  CHECK(theta_derivative(f, 1).max_abs() < 1e-13);
  CHECK(theta_derivative(f, 2).max_abs() < 1e-12);
}

TEST_CASE("second theta derivative of cos 2t") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  auto f = theta_profile(g, 0, [](double t) { return std::cos(2.0 * t); });
  auto d2 = theta_derivative(f, 2);
  auto expect =
      theta_profile(g, 0, [](double t) { return -4.0 * std::cos(2.0 * t); });
  CHECK(d2.max_abs_diff(expect) < 1e-12);
}

TEST_CASE("x derivative of sin x1 is 4th order") {
  const GridSpec g32 = GridSpec::make(32, 8, 8);
  auto f = x_profile(g32, [](double x1, double) { return std::sin(x1); });
  auto d = x_derivative(f, 1, 1);
  auto expect = x_profile(g32, [](double x1, double) { return std::cos(x1); });
  const double err32 = d.max_abs_diff(expect);
  // 4th-order central on sin: |err| <= h^4/30
  CHECK(err32 < 5e-5);
  CHECK(err32 > 1e-7);

  const GridSpec g64 = GridSpec::make(64, 8, 8);
  auto f64 = x_profile(g64, [](double x1, double) { return std::sin(x1); });
  auto d64 = x_derivative(f64, 1, 1);
  auto e64 = x_profile(g64, [](double x1, double) { return std::cos(x1); });
  const double err64 = d64.max_abs_diff(e64);
  CHECK(err32 / err64 > 12.0);
  CHECK(err32 / err64 < 20.0);
}

TEST_CASE("x derivative of a constant and of the other axis vanish") {
  const GridSpec g = GridSpec::make(16, 16, 8);
  auto c = x_profile(g, [](double, double) { return 3.25; });
  CHECK(x_derivative(c, 1, 1).max_abs() == 0.0);
  CHECK(x_derivative(c, 2, 2).max_abs() < 1e-13);
  auto f = x_profile(g, [](double, double x2) { return std::cos(x2); });
  CHECK(x_derivative(f, 1, 1).max_abs() == 0.0);
}

TEST_CASE("y derivative of the coordinate function y1") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f = theta_profile(g, 1, [](double t) { return std::cos(t); });
  auto d = y_derivative(f);
  CHECK(d.degree() == 0);
  CHECK(d.rank() == 1);
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    CHECK(d.component(0)[n] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(d.component(1)[n]) < 1e-13);
  }
}

TEST_CASE("y derivative of F^2 for the euclidean norm gives 2 y_i") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f2 = theta_profile(g, 2, [](double) { return 1.0; });
  auto d = y_derivative(f2);
  const FiberFrame& fr = fiber_frame(g);
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    const int k = static_cast<int>(n % g.ntheta);
    CHECK(d.component(0)[n] == doctest::Approx(2.0 * fr.e(0, k)).epsilon(1e-13));
    CHECK(d.component(1)[n] == doctest::Approx(2.0 * fr.e(1, k)).epsilon(1e-13));
  }
}

TEST_CASE("y derivative of a degree-0 profile matches the ambient difference") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  auto f = theta_profile(g, 0, [](double t) { return std::cos(2.0 * t); });
  auto d = y_derivative(f);

  // closed form: -2 sin(2t) m_i
  const FiberFrame& fr = fiber_frame(g);
  for (std::size_t n = 0; n < g.nodes(); n += 7) {
    const int k = static_cast<int>(n % g.ntheta);
    const double expect0 = -2.0 * std::sin(2.0 * g.theta(k)) * fr.m(0, k);
    const double expect1 = -2.0 * std::sin(2.0 * g.theta(k)) * fr.m(1, k);
    CHECK(d.component(0)[n] == doctest::Approx(expect0).epsilon(1e-10));
    CHECK(d.component(1)[n] == doctest::Approx(expect1).epsilon(1e-10));
  }

  // ambient oracle: f(y) = cos(2 atan2(y2, y1)), 0-homogeneous
  oracles::Ambient amb = [](double, double, double y1, double y2) {
    return std::cos(2.0 * std::atan2(y2, y1));
  };
  const double eps = 1e-5;
  for (int k : {3, 17, 40, 55}) {
    const double t = g.theta(k);
    const oracles::Vec2 y{std::cos(t), std::sin(t)};
    for (int i = 0; i < 2; ++i) {
      const double fd = oracles::ambient_d1(amb, {0.0, 0.0}, y, 2 + i, eps);
      const std::size_t node = static_cast<std::size_t>(k);
      CHECK(d.component(i)[node] == doctest::Approx(fd).epsilon(1e-8));
    }
  }
}

TEST_CASE("euler identity for random smooth fields") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  std::mt19937 rng(12345);
  for (int degree : {-1, 0, 1, 2, 3}) {
    auto f = oracles::random_smooth_scalar(g, degree, rng);
    auto contracted = contract_unit_y(y_derivative(f), 0);
    HomogeneousField expect = f;
    expect *= static_cast<double>(degree);
    CHECK(contracted.max_abs_diff(expect) < 1e-10);
  }
}

TEST_CASE("second vertical derivative of a scalar is symmetric") {
  const GridSpec g = GridSpec::make(8, 8, 64);
  std::mt19937 rng(777);
  for (int rep = 0; rep < 3; ++rep) {
    auto f = oracles::random_smooth_scalar(g, 2, rng);
    auto hess = y_derivative(y_derivative(f));
    double asym = 0.0;
    for (std::size_t n = 0; n < g.nodes(); ++n) {
      asym = std::max(asym,
                      std::abs(hess.component(1)[n] - hess.component(2)[n]));
    }
    CHECK(asym < 1e-10);
  }
}

TEST_CASE("theta and x derivatives commute on smooth fields") {
  const GridSpec g = GridSpec::make(16, 16, 32);
  std::mt19937 rng(4242);
  auto f = oracles::random_smooth_scalar(g, 0, rng);
  auto ab = theta_derivative(x_derivative(f, 1, 1), 1);
  auto ba = x_derivative(theta_derivative(f, 1), 1, 1);
  CHECK(ab.max_abs_diff(ba) < 1e-11);
}

TEST_CASE("structural degree bookkeeping of vertical differentiation") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto f = HomogeneousField::scalar(g, 2);
  auto d = y_derivative(f);
  CHECK(d.degree() == 1);
  CHECK(d.variance().back() == Var::Lower);
  auto dd = y_derivative(d);
  CHECK(dd.degree() == 0);
  CHECK(dd.rank() == 2);
}

TEST_CASE("trace requires opposite variance") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  HomogeneousField f(g, 0, {Var::Lower, Var::Lower});
  CHECK_THROWS_AS(trace(f, 0, 1), ConfigError);
  HomogeneousField ok(g, 0, {Var::Upper, Var::Lower});
  CHECK_NOTHROW(trace(ok, 0, 1));
}

TEST_CASE("fiber low-pass keeps low harmonics exactly and kills the rest") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto low = theta_profile(g, 0, [](double t) {
    return 1.5 + std::cos(t) - 0.25 * std::sin(2.0 * t);
  });
  auto high = theta_profile(g, 0, [](double t) { return std::cos(5.0 * t); });
  HomogeneousField mixed = low;
  mixed.axpy(1.0, high);

  auto filtered = theta_lowpass(mixed, 2);
  CHECK(filtered.max_abs_diff(low) < 1e-13);

  // theta-independent fields pass through bitwise
  auto flat = theta_profile(g, 0, [](double) { return 0.731; });
  CHECK(theta_lowpass(flat, 2).max_abs_diff(flat) == 0.0);

  // negative cutoff and cutoffs at the band edge are no-ops
  CHECK(theta_lowpass(mixed, -1).max_abs_diff(mixed) == 0.0);
  CHECK(theta_lowpass(mixed, 16).max_abs_diff(mixed) == 0.0);
}

TEST_CASE("theta derivative rejects odd ntheta") {
  // GridSpec::make already rejects odd counts; exercise the operator check
  // through a hand-built spec to keep the error path covered.
  GridSpec g{8, 8, 9};
  HomogeneousField f(g, 0, {});
  CHECK_THROWS_AS(theta_derivative(f, 1), ConfigError);
}
