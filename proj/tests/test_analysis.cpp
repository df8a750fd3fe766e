#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/analysis.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

MetricField euclidean_metric(const GridSpec& g) {
  FinslerField f = make_zoo_metric(g, "euclidean", {});
  return fundamental_tensor(f);
}

FlowRun homothetic_run(const GridSpec& g, double c, double horizon) {
  auto f0 = make_zoo_metric(g, "randers-torus", {{"b1", 0.2}, {"b2", 0.1}});
  FlowConfig cfg;
  cfg.mode = FlowMode::Prescribed;
  cfg.prescribed.c = c;
  cfg.horizon = horizon;
  return run_flow(f0, cfg);
}

FlowRun conformal_run(const GridSpec& g, double a, double horizon) {
  auto f0 = make_zoo_metric(g, "conformal-torus", {{"a", a}});
  FlowConfig cfg;
  cfg.mode = FlowMode::Ricci;
  cfg.horizon = horizon;
  return run_flow(f0, cfg);
}

}  // namespace

TEST_CASE("norm of the metric itself is sqrt(n) = sqrt(2)") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto m = euclidean_metric(g);
  auto r = tensor_norm_sup(m.g, m);
  CHECK(r.sup == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  auto field = tensor_norm_field(m.g, m);
  for (std::size_t n = 0; n < g.nodes(); n += 13) {
    CHECK(field.component(0)[n] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("norm of c delta against the flat metric is |c| sqrt(2)") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto m = euclidean_metric(g);
  const double c = -3.5;
  HomogeneousField t(g, 0, {Var::Lower, Var::Lower});
  auto t11 = t.component(0), t22 = t.component(3);
  std::fill(t11.begin(), t11.end(), c);
  std::fill(t22.begin(), t22.end(), c);
  CHECK(tensor_norm_sup(t, m).sup ==
        doctest::Approx(std::abs(c) * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("tensor norm matches the brute-force contraction oracle") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto f = make_zoo_metric(g, "randers-torus", {{"b1", 0.3}, {"b2", 0.1}});
  auto m = fundamental_tensor(f);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  const std::vector<std::vector<Var>> shapes = {
      {Var::Lower},
      {Var::Upper, Var::Lower},
      {Var::Lower, Var::Lower},
      {Var::Lower, Var::Lower, Var::Lower},
  };
  for (const auto& shape : shapes) {
    HomogeneousField t(g, 0, shape);
    for (double& v : t.raw()) v = u(rng);
    auto nf = tensor_norm_field(t, m);
    for (std::size_t n = 17; n < g.nodes(); n += 211) {
      oracles::Mat2 gm{{{m.g.component(0)[n], m.g.component(1)[n]},
                        {m.g.component(2)[n], m.g.component(3)[n]}}};
      oracles::Mat2 gi{{{m.g_inv.component(0)[n], m.g_inv.component(1)[n]},
                        {m.g_inv.component(2)[n], m.g_inv.component(3)[n]}}};
      const double expect =
          std::sqrt(oracles::norm_sq_bruteforce(t, n, gm, gi));
      CHECK(nf.component(0)[n] == doctest::Approx(expect).epsilon(1e-11));
    }
  }
}

TEST_CASE("tensor norm scaling laws") {
  const GridSpec g = GridSpec::make(8, 8, 16);
  auto f = make_zoo_metric(g, "randers-torus", {{"b1", 0.2}, {"b2", 0.0}});
  auto m = fundamental_tensor(f);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HomogeneousField t(g, 0, {Var::Lower, Var::Lower});
  for (double& v : t.raw()) v = u(rng);

  const double lambda = -2.25;
  HomogeneousField scaled = t;
  scaled *= lambda;
  auto n1 = tensor_norm_field(t, m);
  auto n2 = tensor_norm_field(scaled, m);
  n1 *= std::abs(lambda);
  CHECK(n2.max_abs_diff(n1) < 1e-12);

  // metric scaled by mu^2 rescales a (0,2) norm by mu^-2
  const double mu = 1.7;
  FinslerField fs = f;
  fs.phi *= mu;
  auto ms = fundamental_tensor(fs);
  auto n3 = tensor_norm_field(t, ms);
  auto expect = tensor_norm_field(t, m);
  expect *= 1.0 / (mu * mu);
  CHECK(n3.max_abs_diff(expect) < 1e-12);
}

TEST_CASE("tensor norm rejects mismatched grids") {
  auto m = euclidean_metric(GridSpec::make(8, 8, 16));
  HomogeneousField t(GridSpec::make(16, 8, 16), 0, {Var::Lower, Var::Lower});
  CHECK_THROWS_AS(tensor_norm_field(t, m), ConfigError);
}

TEST_CASE("pencil eigenvalues match the brute-force 2x2 oracle") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    // random SPD pair
    const double a11 = 1.0 + std::abs(u(rng)), a22 = 1.0 + std::abs(u(rng));
    const double a12 = 0.5 * u(rng);
    const double b11 = 1.0 + std::abs(u(rng)), b22 = 1.0 + std::abs(u(rng));
    const double b12 = 0.5 * u(rng);
    const auto got = pencil_eigenvalues(a11, a12, a22, b11, b12, b22);
    const auto expect = oracles::pencil_eigenvalues_bruteforce(
        {{{a11, a12}, {a12, a22}}}, {{{b11, b12}, {b12, b22}}});
    CHECK(got[0] == doctest::Approx(expect[0]).epsilon(1e-10));
    CHECK(got[1] == doctest::Approx(expect[1]).epsilon(1e-10));
  }
}

TEST_CASE("norm series of a stationary run vanishes") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  auto f0 = make_zoo_metric(g, "minkowski-quartic", {});
  FlowConfig cfg;
  cfg.horizon = 0.2;
  const FlowRun run = run_flow(f0, cfg);
  const NormSeries s = norm_series(run);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    CHECK(s.u0[k] < 1e-10);
    CHECK(s.u1[k] < 1e-10);
    CHECK(s.uhat0[k] < 1e-10);
    CHECK(s.uhat1[k] < 1e-10);
  }
}

TEST_CASE("homothetic norm series follows the scaled closed forms") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  const double c = 0.1;
  const FlowRun run = homothetic_run(g, c, 2.0);
  const NormSeries s = norm_series(run);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    const double mu = 1.0 - 2.0 * c * s.t[k];
    CHECK(s.u0[k] ==
          doctest::Approx(2.0 * c * std::sqrt(2.0) / mu).epsilon(1e-9));
    CHECK(s.uhat0[k] ==
          doctest::Approx(2.0 * c * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(s.u1[k] < 1e-9);
    CHECK(s.uhat1[k] < 1e-9);
  }
}

TEST_CASE("uniform equivalence certificate on stationary and homothetic runs") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  {
    auto f0 = make_zoo_metric(g, "minkowski-quartic", {});
    FlowConfig cfg;
    cfg.horizon = 0.3;
    const FlowRun run = run_flow(f0, cfg);
    const Certificate cert = uniform_equivalence_certificate(run, 1e-3);
    CHECK(cert.pass);
    CHECK(std::abs(cert.residual) < 1e-9);
  }
  {
    const FlowRun run = homothetic_run(g, 0.1, 2.0);
    // accepted-step integral of u0 tracks -sqrt(2) ln mu
    const double lambda_T = run.int_u0;
    CHECK(lambda_T ==
          doctest::Approx(-std::sqrt(2.0) * std::log(0.6)).epsilon(1e-4));
    const Certificate cert = uniform_equivalence_certificate(run, 1e-3);
    CHECK(cert.pass);
  }
}

TEST_CASE("gamma difference and commutation vanish at t=0 and on homothetic runs") {
  const GridSpec g = GridSpec::make(16, 16, 16);
  const FlowRun run = homothetic_run(g, 0.1, 1.0);
  REQUIRE(run.snapshots.size() >= 2);
  CHECK(commutation_residual_at(run, 0) < 1e-10);
  const int last = static_cast<int>(run.snapshots.size()) - 1;
  CHECK(commutation_residual_at(run, last) < 1e-10);
  const Certificate gd = gamma_difference_certificate(run, 1e-3);
  CHECK(gd.pass);
  CHECK(gd.residual < 1e-10);
}

TEST_CASE("conformal run: gamma difference and commutation at discretization level") {
  const GridSpec g = GridSpec::make(32, 32, 16);
  const FlowRun run = conformal_run(g, 0.05, 0.25);
  REQUIRE(run.stop == StopReason::ReachedHorizon);
  const Certificate gd = gamma_difference_certificate(run, 1e-4);
  CHECK(gd.pass);
  const Certificate cm = commutation_certificate(run, 1e-4);
  CHECK(cm.pass);
  CHECK(cm.residual > 0.0);
}

TEST_CASE("u1 self-converges under grid refinement") {
  auto final_u1 = [](int n) {
    const GridSpec g = GridSpec::make(n, n, n);
    auto f0 = make_zoo_metric(g, "conformal-torus", {{"a", 0.1}});
    FlowConfig cfg;
    cfg.horizon = 0.1;
    const FlowRun run = run_flow(f0, cfg);
    REQUIRE(run.stop == StopReason::ReachedHorizon);
    const NormSeries s = norm_series(run);
    return s.u1.back();
  };
  const double coarse = final_u1(16);
  const double fine = final_u1(32);
  CHECK(coarse > 0.0);
  CHECK(std::abs(coarse - fine) / fine < 0.05);
}

TEST_CASE("cauchy tail certificate on stationary and homothetic runs") {
  const GridSpec g = GridSpec::make(8, 8, 32);
  {
    auto f0 = make_zoo_metric(g, "minkowski-quartic", {});
    FlowConfig cfg;
    cfg.horizon = 0.3;
    const FlowRun run = run_flow(f0, cfg);
    const LimitMetric lim = limit_metric(run);
    const Certificate cert = cauchy_tail_certificate(run, lim, 1e-3);
    CHECK(cert.pass);
  }
  {
    const FlowRun run = homothetic_run(g, 0.1, 2.0);
    const LimitMetric lim = limit_metric(run);
    const Certificate cert = cauchy_tail_certificate(run, lim, 1e-3);
    CHECK(cert.pass);
    // the tail bound is saturated for the homothetic law
    CHECK(std::abs(cert.residual) < 1e-6);
    CHECK(limit_positive_definite_certificate(lim).pass);
    CHECK(fbar_hessian_certificate(lim, 1e-10).pass);
  }
}

TEST_CASE("full certificate suite passes on the homothetic run") {
  const GridSpec g = GridSpec::make(16, 16, 16);
  const FlowRun run = homothetic_run(g, 0.1, 2.0);
  const auto certs = verify_certificates(run, 1e-3, 1e-5);
  CHECK(certs.size() == 6);
  for (const Certificate& c : certs) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
}
