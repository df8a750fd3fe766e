#ifndef FINSLER_CLI_HPP
#define FINSLER_CLI_HPP

#include <optional>
#include <ostream>
#include <string>

#include "finsler/scenario.hpp"

namespace finsler {

/// Curvature table for the scenario metric, written as CSV to
/// <out_dir>/curvature.csv. Chart-restricted families are evaluated at a
/// fixed set of interior points instead of the periodic grid.
int cmd_curvature(const Scenario& scenario, const std::string& out_dir,
                  std::ostream& log);

/// Integrates the flow and persists the run. Nonzero exit iff the run ends
/// non-finite.
int cmd_flow(const Scenario& scenario, const std::string& out_dir,
             std::ostream& log);

/// Evaluates the certificate suite on a persisted run; writes
/// certificates.txt. Nonzero exit iff any certificate fails, the run ended
/// non-finite, or the directory is unreadable.
int cmd_verify(const std::string& run_dir, std::optional<double> tol_override,
               std::ostream& log);

/// Summarizes a persisted run (series statistics, stop reason, certificate
/// digest) to <run_dir>/report.txt and the log stream.
int cmd_report(const std::string& run_dir, std::ostream& log);

}  // namespace finsler

#endif
