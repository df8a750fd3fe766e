#include "finsler/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "finsler/curvature.hpp"
#include "finsler/pointwise.hpp"
#include "finsler/run_io.hpp"

namespace finsler {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* kCsvHeader =
    "ix1,ix2,itheta,x1,x2,theta,phi,det_g,ric,ric_11,ric_12,ric_22\n";

int curvature_grid(const Scenario& scenario, const std::string& path) {
  const FinslerField f =
      make_zoo_metric(scenario.grid, scenario.family, scenario.metric_params);
  const MetricField m = fundamental_tensor(f);
  const SprayField s = spray(f, m);
  const CurvatureBundle c = curvature_pipeline(f, s);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kCsvHeader;
  const GridSpec& g = scenario.grid;
  for (int i = 0; i < g.nx1; ++i) {
    for (int j = 0; j < g.nx2; ++j) {
      for (int k = 0; k < g.ntheta; ++k) {
        const std::size_t n =
            (static_cast<std::size_t>(i) * g.nx2 + j) * g.ntheta + k;
        const double det = m.g.component(0)[n] * m.g.component(3)[n] -
                           m.g.component(1)[n] * m.g.component(1)[n];
        out << i << "," << j << "," << k << "," << fmt(g.x1(i)) << ","
            << fmt(g.x2(j)) << "," << fmt(g.theta(k)) << ","
            << fmt(f.phi.component(0)[n]) << "," << fmt(det) << ","
            << fmt(c.ric_scalar.component(0)[n]) << ","
            << fmt(c.ric_tensor.component(0)[n]) << ","
            << fmt(c.ric_tensor.component(1)[n]) << ","
            << fmt(c.ric_tensor.component(3)[n]) << "\n";
      }
    }
  }
  return 0;
}

int curvature_pointwise(const Scenario& scenario, const std::string& path) {
  const ChartMetric phi = make_chart_metric(scenario.family);
  // fixed interior probe points of the chart
  const std::array<std::array<double, 2>, 10> points{{{0.0, 0.0},
                                                      {0.2, 0.0},
                                                      {0.0, 0.25},
                                                      {-0.3, 0.1},
                                                      {0.15, -0.2},
                                                      {-0.1, -0.3},
                                                      {0.35, 0.2},
                                                      {-0.25, -0.15},
                                                      {0.1, 0.4},
                                                      {-0.4, 0.05}}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kCsvHeader;
  const int nt = scenario.grid.ntheta;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto pc = pointwise_curvature(phi, points[p], nt, 0.015);
    for (int k = 0; k < nt; ++k) {
      out << p << ",0," << k << "," << fmt(points[p][0]) << ","
          << fmt(points[p][1]) << "," << fmt(kTwoPi * k / nt) << ","
          << fmt(pc.phi[k]) << "," << fmt(pc.det_g[k]) << "," << fmt(pc.ric[k])
          << "," << fmt(pc.ric_tensor[0][k]) << "," << fmt(pc.ric_tensor[1][k])
          << "," << fmt(pc.ric_tensor[3][k]) << "\n";
    }
  }
  return 0;
}

}  // namespace

int cmd_curvature(const Scenario& scenario, const std::string& out_dir,
                  std::ostream& log) {
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const std::string path = (fs::path(out_dir) / "curvature.csv").string();
    const int rc = is_pointwise_family(scenario.family)
                       ? curvature_pointwise(scenario, path)
                       : curvature_grid(scenario, path);
    log << "curvature table written to " << path << "\n";
    return rc;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_flow(const Scenario& scenario, const std::string& out_dir,
             std::ostream& log) {
  try {
    const FinslerField f0 =
        make_zoo_metric(scenario.grid, scenario.family, scenario.metric_params);
    const FlowRun run = run_flow(f0, scenario.flow);
    Scenario persisted = scenario;
    persisted.out_dir = out_dir;
    write_run(run, persisted, out_dir);
    log << "flow stopped: " << to_string(run.stop) << " at t=" << run.t_end
        << " after " << run.accepted_steps << " steps; " << run.snapshots.size()
        << " snapshots in " << out_dir << "\n";
    return run.stop == StopReason::NonFinite ? 1 : 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_verify(const std::string& run_dir, std::optional<double> tol_override,
               std::ostream& log) {
  try {
    const Scenario scenario = read_run_scenario(run_dir);
    const FlowRun run = read_run(run_dir);
    const double tol = tol_override.value_or(scenario.certificate_tol);
    const double fbar_tol = tol_override.value_or(scenario.fbar_tol);

    const auto certs = verify_certificates(run, tol, fbar_tol);
    write_certificates(certs, (fs::path(run_dir) / "certificates.txt").string());

    bool all_pass = true;
    for (const Certificate& c : certs) {
      log << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
          << "  residual=" << c.residual << "  tolerance=" << c.tolerance
          << "  witness=" << c.witness << "\n";
      all_pass = all_pass && c.pass;
    }
    if (run.stop == StopReason::NonFinite) {
      log << "run ended non-finite\n";
      return 1;
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_report(const std::string& run_dir, std::ostream& log) {
  try {
    const Scenario scenario = read_run_scenario(run_dir);
    const FlowRun run = read_run(run_dir);

    std::ostringstream rep;
    rep << "run " << run_dir << "\n";
    rep << "family " << scenario.family << "\n";
    rep << "grid " << run.grid.nx1 << "x" << run.grid.nx2 << "x"
        << run.grid.ntheta << "\n";
    rep << "mode " << to_string(run.mode) << "\n";
    rep << "horizon " << run.horizon << "\n";
    rep << "stop_reason " << to_string(run.stop) << "\n";
    rep << "t_end " << run.t_end << "\n";
    rep << "accepted_steps " << run.accepted_steps << "\n";
    rep << "snapshots " << run.snapshots.size() << "\n";
    if (!run.series.empty()) {
      double sup_ric = 0.0, max_u0 = 0.0, min_margin =
          std::numeric_limits<double>::infinity();
      for (const SeriesRow& r : run.series) {
        if (std::isfinite(r.sup_ric)) sup_ric = std::max(sup_ric, r.sup_ric);
        if (std::isfinite(r.u0)) max_u0 = std::max(max_u0, r.u0);
        if (std::isfinite(r.margin)) min_margin = std::min(min_margin, r.margin);
      }
      rep << "max_sup_ric " << sup_ric << "\n";
      rep << "max_u0 " << max_u0 << "\n";
      rep << "min_convexity_margin " << min_margin << "\n";
      rep << "final_int_u0 " << run.series.back().int_u0 << "\n";
    }

    bool cert_fail = false;
    const std::string cert_path =
        (fs::path(run_dir) / "certificates.txt").string();
    if (fs::exists(cert_path)) {
      const auto certs = read_certificates(cert_path);
      int passed = 0;
      for (const Certificate& c : certs) {
        if (c.pass) ++passed;
        else cert_fail = true;
      }
      rep << "certificates " << passed << "/" << certs.size() << " passed\n";
      for (const Certificate& c : certs) {
        rep << "  " << (c.pass ? "pass" : "FAIL") << " " << c.name
            << " residual=" << c.residual << " tolerance=" << c.tolerance
            << "\n";
      }
    } else {
      rep << "certificates not evaluated (run 'verify' first)\n";
    }

    std::ofstream out(fs::path(run_dir) / "report.txt");
    if (!out) throw IoError("cannot write report.txt in '" + run_dir + "'");
    out << rep.str();
    log << rep.str();
    return (run.stop == StopReason::NonFinite || cert_fail) ? 1 : 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace finsler
