#ifndef FINSLER_FLOW_HPP
#define FINSLER_FLOW_HPP

#include <string>
#include <vector>

#include "finsler/curvature.hpp"

namespace finsler {

enum class FlowMode { Ricci, Prescribed };

enum class StopReason {
  ReachedHorizon,
  ConvexityLoss,
  CurvatureThreshold,
  NonFinite,
};

std::string to_string(StopReason r);
std::string to_string(FlowMode m);
FlowMode flow_mode_from_string(const std::string& s);
StopReason stop_reason_from_string(const std::string& s);

/// Closed-form deformation family for prescribed mode. The shipped law is
/// homothetic: omega(t) = -2c g(0), constant in t.
struct PrescribedLaw {
  double c = 0.1;
};

struct FlowConfig {
  FlowMode mode = FlowMode::Ricci;
  PrescribedLaw prescribed;
  double horizon = 1.0;
  double dt_max = 1e-2;
  double c_cfl = 0.2;
  double eps_conv = 1e-6;
  double r_max = 1e3;
  int snapshot_every = 10;
  /// Ricci-mode updates are projected onto fiber harmonics <= this order.
  /// The flow is not parabolic in the higher fiber directions (they grow at
  /// rate ~ k^2 m^2 from any seed), so the default keeps the well-posed
  /// quadratic-plus-drift sector. Negative disables the projection.
  int fiber_mode_cut = 2;
};

/// Current point of the evolution with its cached geometry. In ricci mode the
/// evolving unknown is phi and g is its fundamental tensor; in prescribed
/// mode g advances directly and phi is recovered as sqrt(g_ij y^i y^j).
struct FlowState {
  double t = 0.0;
  FinslerField phi;
  MetricField g;
  SprayField spray;
  CurvatureBundle curv;
  HomogeneousField omega;  // dg/dt at time t
  double sup_ric = 0.0;
  double margin = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
  bool terminal = false;
  StopReason reason = StopReason::ReachedHorizon;
};

struct Snapshot {
  double t = 0.0;
  HomogeneousField phi;
  HomogeneousField g;
  HomogeneousField omega;
  double int_u0 = 0.0;
};

struct SeriesRow {
  double t = 0.0;
  double dt = 0.0;
  double sup_ric = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
  double int_u0 = 0.0;
  double margin = 0.0;
};

struct FlowRun {
  GridSpec grid;
  FlowMode mode = FlowMode::Ricci;
  PrescribedLaw prescribed;
  double horizon = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<SeriesRow> series;
  StopReason stop = StopReason::ReachedHorizon;
  double t_end = 0.0;
  long accepted_steps = 0;
  /// Trapezoid of omega over accepted steps (not snapshots).
  HomogeneousField int_omega;
  double int_u0 = 0.0;
};

/// g(0) + integral of omega up to the end of the run, with the Finsler norm
/// rebuilt from it and the vertical-Hessian reconstruction residual.
struct LimitMetric {
  HomogeneousField gbar;
  HomogeneousField fbar;  // degree-1 scalar; zero when gbar is indefinite
  bool positive_definite = false;
  double min_det = 0.0;
  GridNode worst;
  double hessian_residual = 0.0;
};

/// Builds the full cached state for a metric at time t. Terminal flags are
/// set (not thrown) when invariants fail.
FlowState make_state(FinslerField phi, double t, const FlowConfig& cfg,
                     const HomogeneousField* g0);

/// Time derivative of phi in ricci mode: -phi * ric, projected onto fiber
/// modes <= fiber_mode_cut. Empty optional when the stage geometry is not
/// strongly convex.
std::optional<HomogeneousField> ricci_rhs(const HomogeneousField& phi_samples,
                                          double eps_conv,
                                          int fiber_mode_cut = 2);

/// omega(t) for the prescribed law.
HomogeneousField prescribed_omega(const PrescribedLaw& law,
                                  const HomogeneousField& g0, double t);

/// One accepted step (classical RK4); returns the advanced state, which may
/// be terminal. Returns nullopt when a stage could not be evaluated at all,
/// with *why set.
std::optional<FlowState> flow_step(const FlowState& state, double dt,
                                   const FlowConfig& cfg,
                                   const HomogeneousField* g0,
                                   StopReason* why);

FlowRun run_flow(const FinslerField& f0, const FlowConfig& cfg);

LimitMetric limit_metric(const FlowRun& run);

}  // namespace finsler

#endif
