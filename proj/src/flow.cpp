#include "finsler/flow.hpp"

#include <cmath>

#include "finsler/analysis.hpp"

namespace finsler {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::ReachedHorizon: return "reached-horizon";
    case StopReason::ConvexityLoss: return "convexity-loss";
    case StopReason::CurvatureThreshold: return "curvature-threshold";
    case StopReason::NonFinite: return "non-finite";
  }
  return "unknown";
}

std::string to_string(FlowMode m) {
  return m == FlowMode::Ricci ? "ricci" : "prescribed-homothetic";
}

FlowMode flow_mode_from_string(const std::string& s) {
  if (s == "ricci") return FlowMode::Ricci;
  if (s == "prescribed-homothetic") return FlowMode::Prescribed;
  throw ConfigError("unknown flow mode '" + s + "'");
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "reached-horizon") return StopReason::ReachedHorizon;
  if (s == "convexity-loss") return StopReason::ConvexityLoss;
  if (s == "curvature-threshold") return StopReason::CurvatureThreshold;
  if (s == "non-finite") return StopReason::NonFinite;
  throw ConfigError("unknown stop reason '" + s + "'");
}

namespace {

// -phi * ric projected onto the stabilized fiber band; the scalar update of
// the ricci mode.
HomogeneousField filtered_phidot(const HomogeneousField& phi,
                                 const HomogeneousField& ric, int cut) {
  HomogeneousField rhs = HomogeneousField::scalar(phi.grid(), 1);
  auto p = phi.component(0);
  auto r = ric.component(0);
  auto o = rhs.component(0);
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = -p[n] * r[n];
  return theta_lowpass(rhs, cut);
}

HomogeneousField recovered_phi(const HomogeneousField& g, bool* ok) {
  const GridSpec& grid = g.grid();
  const FiberFrame& fr = fiber_frame(grid);
  HomogeneousField phi = HomogeneousField::scalar(grid, 1);
  auto g11 = g.component(0), g12 = g.component(1), g22 = g.component(3);
  auto o = phi.component(0);
  bool positive = true;
  const int nt = grid.ntheta;
  for (std::size_t n = 0; n < o.size(); ++n) {
    const int k = static_cast<int>(n % nt);
    const double e1 = fr.e(0, k), e2 = fr.e(1, k);
    const double q =
        g11[n] * e1 * e1 + 2.0 * g12[n] * e1 * e2 + g22[n] * e2 * e2;
    if (!(q > 0.0)) positive = false;
    o[n] = std::sqrt(std::max(q, 0.0));
  }
  if (ok) *ok = positive;
  return phi;
}

}  // namespace

FlowState make_state(FinslerField phi, double t, const FlowConfig& cfg,
                     const HomogeneousField* g0) {
  FlowState st;
  st.t = t;
  st.phi = std::move(phi);

  if (!st.phi.phi.finite()) {
    st.terminal = true;
    st.reason = StopReason::NonFinite;
    st.margin = std::nan("");
    st.sup_ric = std::nan("");
    st.u0 = st.u1 = std::nan("");
    return st;
  }

  double min_phi = 0.0, min_margin = 0.0;
  st.phi.positivity_stats(&min_phi, &min_margin, nullptr);
  st.margin = std::min(min_phi, min_margin);
  if (!(min_phi > cfg.eps_conv) || !(min_margin > cfg.eps_conv)) {
    st.terminal = true;
    st.reason = StopReason::ConvexityLoss;
    st.sup_ric = std::nan("");
    st.u0 = st.u1 = std::nan("");
    return st;
  }

  HomogeneousField d_f2;
  auto metric = try_fundamental_tensor(st.phi, &d_f2);
  if (!metric) {
    st.terminal = true;
    st.reason = StopReason::ConvexityLoss;
    st.sup_ric = std::nan("");
    st.u0 = st.u1 = std::nan("");
    return st;
  }
  st.g = std::move(*metric);
  st.spray = spray(st.phi, st.g, &d_f2);
  st.curv = curvature_pipeline(st.phi, st.spray);

  if (cfg.mode == FlowMode::Ricci) {
    // omega is the actual dg/dt of the integrated evolution: with the
    // stabilized scalar update phidot this is the vertical hessian of
    // phi*phidot, which reduces to -2 Ric when the projection is inactive
    const HomogeneousField phidot =
        filtered_phidot(st.phi.phi, st.curv.ric_scalar, cfg.fiber_mode_cut);
    HomogeneousField h = HomogeneousField::scalar(st.phi.phi.grid(), 2);
    auto p = st.phi.phi.component(0);
    auto pd = phidot.component(0);
    auto o = h.component(0);
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = p[n] * pd[n];
    st.omega = vertical_hessian(h);
  } else {
    st.omega = prescribed_omega(cfg.prescribed, *g0, t);
  }

  if (!st.curv.ric_scalar.finite() || !st.omega.finite()) {
    st.terminal = true;
    st.reason = StopReason::NonFinite;
    st.sup_ric = std::nan("");
    st.u0 = st.u1 = std::nan("");
    return st;
  }

  st.sup_ric = st.curv.ric_scalar.max_abs();
  st.u0 = tensor_norm_sup(st.omega, st.g).sup;
  {
    const ConnectionField conn = cartan_horizontal_coefficients(st.g, st.spray.N);
    const HomogeneousField nabla_omega =
        horizontal_covariant_derivative_02(st.omega, conn);
    st.u1 = tensor_norm_sup(nabla_omega, st.g).sup;
  }

  if (st.sup_ric >= cfg.r_max) {
    st.terminal = true;
    st.reason = StopReason::CurvatureThreshold;
  }
  return st;
}

namespace {

// Prescribed mode: advance g directly with the advanced state's phi recovered
// from g. Builds the full cached state but keeps the advanced g as the
// state's metric.
FlowState make_state_prescribed(HomogeneousField g_samples, double t,
                                const FlowConfig& cfg,
                                const HomogeneousField* g0) {
  FlowState st;
  st.t = t;

  if (!g_samples.finite()) {
    st.terminal = true;
    st.reason = StopReason::NonFinite;
    st.margin = st.sup_ric = st.u0 = st.u1 = std::nan("");
    st.g.g = std::move(g_samples);
    return st;
  }

  bool ok = true;
  FinslerField phi;
  phi.family = "recovered";
  phi.phi = recovered_phi(g_samples, &ok);
  double min_det = 0.0;
  GridNode worst;
  HomogeneousField g_inv = invert_metric(g_samples, &min_det, &worst);
  if (!ok || min_det <= 0.0) {
    st.terminal = true;
    st.reason = StopReason::ConvexityLoss;
    st.margin = 0.0;
    st.sup_ric = st.u0 = st.u1 = std::nan("");
    st.g.g = std::move(g_samples);
    return st;
  }

  // diagnostics (spray, curvature) come from the recovered norm
  st = make_state(std::move(phi), t, cfg, g0);
  st.g.g = std::move(g_samples);
  st.g.g_inv = std::move(g_inv);
  st.g.min_det = min_det;
  st.g.worst = worst;
  if (!st.terminal) {
    // u0 is defined against the advanced metric, not the recovered one
    st.u0 = tensor_norm_sup(st.omega, st.g).sup;
  }
  return st;
}

}  // namespace

std::optional<HomogeneousField> ricci_rhs(const HomogeneousField& phi_samples,
                                          double eps_conv,
                                          int fiber_mode_cut) {
  FinslerField f;
  f.phi = phi_samples;
  if (!f.phi.finite()) return std::nullopt;
  double min_phi = 0.0, min_margin = 0.0;
  f.positivity_stats(&min_phi, &min_margin, nullptr);
  if (!(min_phi > eps_conv) || !(min_margin > eps_conv)) return std::nullopt;
  HomogeneousField d_f2;
  auto m = try_fundamental_tensor(f, &d_f2);
  if (!m) return std::nullopt;
  const SprayField s = spray(f, *m, &d_f2);
  const HomogeneousField ric = ricci_scalar(reduced_curvature(s, f));
  return filtered_phidot(f.phi, ric, fiber_mode_cut);
}

HomogeneousField prescribed_omega(const PrescribedLaw& law,
                                  const HomogeneousField& g0, double) {
  HomogeneousField omega = g0;
  omega *= -2.0 * law.c;
  return omega;
}

std::optional<FlowState> flow_step(const FlowState& state, double dt,
                                   const FlowConfig& cfg,
                                   const HomogeneousField* g0,
                                   StopReason* why) {
  const GridSpec& grid = state.phi.phi.grid();
  if (!(dt > 0.0)) throw ConfigError("flow_step: dt must be positive");

  if (cfg.mode == FlowMode::Ricci) {
    const HomogeneousField& y0 = state.phi.phi;
    // first stage from the state's cached curvature (same pipeline, same phi)
    std::optional<HomogeneousField> k1;
    if (!state.terminal && state.curv.ric_scalar.grid() == grid) {
      k1 = filtered_phidot(y0, state.curv.ric_scalar, cfg.fiber_mode_cut);
    } else {
      k1 = ricci_rhs(y0, cfg.eps_conv, cfg.fiber_mode_cut);
    }
    if (!k1) {
      if (why) *why = StopReason::ConvexityLoss;
      return std::nullopt;
    }
    HomogeneousField y = y0;
    y.axpy(0.5 * dt, *k1);
    auto k2 = ricci_rhs(y, cfg.eps_conv, cfg.fiber_mode_cut);
    if (!k2) {
      if (why) *why = StopReason::ConvexityLoss;
      return std::nullopt;
    }
    y = y0;
    y.axpy(0.5 * dt, *k2);
    auto k3 = ricci_rhs(y, cfg.eps_conv, cfg.fiber_mode_cut);
    if (!k3) {
      if (why) *why = StopReason::ConvexityLoss;
      return std::nullopt;
    }
    y = y0;
    y.axpy(dt, *k3);
    auto k4 = ricci_rhs(y, cfg.eps_conv, cfg.fiber_mode_cut);
    if (!k4) {
      if (why) *why = StopReason::ConvexityLoss;
      return std::nullopt;
    }
    y = y0;
    y.axpy(dt / 6.0, *k1);
    y.axpy(dt / 3.0, *k2);
    y.axpy(dt / 3.0, *k3);
    y.axpy(dt / 6.0, *k4);

    FinslerField phi = state.phi;
    phi.phi = std::move(y);
    return make_state(std::move(phi), state.t + dt, cfg, g0);
  }

  // prescribed mode: omega is a function of t only, so RK4 reduces to
  // Simpson quadrature of omega over the step
  const HomogeneousField w1 = prescribed_omega(cfg.prescribed, *g0, state.t);
  const HomogeneousField w2 =
      prescribed_omega(cfg.prescribed, *g0, state.t + 0.5 * dt);
  const HomogeneousField w4 = prescribed_omega(cfg.prescribed, *g0, state.t + dt);
  HomogeneousField g = state.g.g;
  g.axpy(dt / 6.0, w1);
  g.axpy(4.0 * dt / 6.0, w2);
  g.axpy(dt / 6.0, w4);
  return make_state_prescribed(std::move(g), state.t + dt, cfg, g0);
}

FlowRun run_flow(const FinslerField& f0, const FlowConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw ConfigError("run_flow: horizon must be > 0");
  const GridSpec grid = f0.phi.grid();

  FlowRun run;
  run.grid = grid;
  run.mode = cfg.mode;
  run.prescribed = cfg.prescribed;
  run.horizon = cfg.horizon;
  run.int_omega = HomogeneousField(grid, 0, {Var::Lower, Var::Lower});

  const HomogeneousField g0_samples = fundamental_tensor(f0).g;

  FlowState state = make_state(f0, 0.0, cfg, &g0_samples);
  if (state.terminal) {
    run.stop = state.reason;
    run.t_end = 0.0;
    run.series.push_back({0.0, 0.0, state.sup_ric, state.u0, state.u1, 0.0,
                          state.margin});
    return run;
  }

  auto push_row = [&](const FlowState& st, double dt) {
    run.series.push_back({st.t, dt, st.sup_ric, st.u0, st.u1, run.int_u0,
                          st.margin});
  };
  auto push_snapshot = [&](const FlowState& st) {
    run.snapshots.push_back({st.t, st.phi.phi, st.g.g, st.omega, run.int_u0});
  };

  push_row(state, 0.0);
  push_snapshot(state);

  const double hmin = grid.hmin();
  while (!state.terminal && state.t < cfg.horizon) {
    double dt = std::min(cfg.dt_max,
                         cfg.c_cfl * hmin * hmin / (1.0 + state.sup_ric));
    const bool final_step = state.t + dt >= cfg.horizon;
    if (final_step) dt = cfg.horizon - state.t;
    if (!(dt > 0.0)) break;

    StopReason why = StopReason::NonFinite;
    auto next = flow_step(state, dt, cfg, &g0_samples, &why);
    if (!next) {
      run.stop = why;
      run.t_end = state.t;
      return run;
    }
    if (final_step) next->t = cfg.horizon;

    const bool can_accumulate =
        !next->terminal || next->reason == StopReason::CurvatureThreshold;
    if (can_accumulate) {
      run.int_omega.axpy(0.5 * dt, state.omega);
      run.int_omega.axpy(0.5 * dt, next->omega);
      run.int_u0 += 0.5 * dt * (state.u0 + next->u0);
    }
    state = std::move(*next);
    ++run.accepted_steps;
    push_row(state, dt);

    if (state.terminal) {
      run.stop = state.reason;
      run.t_end = state.t;
      if (can_accumulate) push_snapshot(state);
      return run;
    }
    if (run.accepted_steps % cfg.snapshot_every == 0 || state.t >= cfg.horizon) {
      push_snapshot(state);
    }
  }

  run.stop = StopReason::ReachedHorizon;
  run.t_end = state.t;
  if (run.snapshots.empty() || run.snapshots.back().t < state.t) {
    push_snapshot(state);
  }
  return run;
}

LimitMetric limit_metric(const FlowRun& run) {
  if (run.snapshots.size() < 2) {
    throw ConfigError("limit_metric requires at least two snapshots");
  }
  LimitMetric lim;
  lim.gbar = run.snapshots.front().g;
  for (std::size_t k = 0; k + 1 < run.snapshots.size(); ++k) {
    const double dt = run.snapshots[k + 1].t - run.snapshots[k].t;
    lim.gbar.axpy(0.5 * dt, run.snapshots[k].omega);
    lim.gbar.axpy(0.5 * dt, run.snapshots[k + 1].omega);
  }

  const GridSpec& grid = lim.gbar.grid();
  const FiberFrame& fr = fiber_frame(grid);
  auto g11 = lim.gbar.component(0), g12 = lim.gbar.component(1),
       g22 = lim.gbar.component(3);

  bool pd = true;
  {
    double mdet = 0.0;
    bool first = true;
    std::size_t at = 0;
    for (std::size_t n = 0; n < g11.size(); ++n) {
      const double det = g11[n] * g22[n] - g12[n] * g12[n];
      if (first || det < mdet) {
        mdet = det;
        at = n;
        first = false;
      }
      if (!(det > 0.0) || !(g11[n] > 0.0)) pd = false;
    }
    lim.min_det = mdet;
    lim.worst.itheta = static_cast<int>(at % grid.ntheta);
    lim.worst.ix2 = static_cast<int>((at / grid.ntheta) % grid.nx2);
    lim.worst.ix1 = static_cast<int>(at / grid.ntheta / grid.nx2);
  }
  lim.positive_definite = pd;

  lim.fbar = HomogeneousField::scalar(grid, 1);
  if (!pd) {
    lim.hessian_residual = std::nan("");
    return lim;
  }

  HomogeneousField fbar2 = HomogeneousField::scalar(grid, 2);
  auto q = fbar2.component(0);
  auto fb = lim.fbar.component(0);
  const int nt = grid.ntheta;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const int k = static_cast<int>(n % nt);
    const double e1 = fr.e(0, k), e2 = fr.e(1, k);
    q[n] = g11[n] * e1 * e1 + 2.0 * g12[n] * e1 * e2 + g22[n] * e2 * e2;
    fb[n] = std::sqrt(q[n]);
  }

  HomogeneousField hess = y_derivative(y_derivative(fbar2));
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto h = hess.component(HomogeneousField::comp_index(i, j));
      auto gb = lim.gbar.component(HomogeneousField::comp_index(i, j));
      for (std::size_t n = 0; n < h.size(); ++n) {
        worst = std::max(worst, std::abs(0.5 * h[n] - gb[n]));
      }
    }
  }
  lim.hessian_residual = worst;
  return lim;
}

}  // namespace finsler
