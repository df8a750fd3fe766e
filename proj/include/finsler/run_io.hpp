#ifndef FINSLER_RUN_IO_HPP
#define FINSLER_RUN_IO_HPP

#include <string>

#include "finsler/analysis.hpp"
#include "finsler/scenario.hpp"

namespace finsler {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Writes scenario.cfg, status.txt, series.csv and one self-describing
/// snapshot file per snapshot (snap_NNNNNN.fsnap) into dir, creating it.
void write_run(const FlowRun& run, const Scenario& scenario,
               const std::string& dir);

/// Reads a run directory back. Missing or truncated snapshot sets raise
/// IoError with a diagnostic naming the missing file.
FlowRun read_run(const std::string& dir);

Scenario read_run_scenario(const std::string& dir);

void write_series_csv(const FlowRun& run, const std::string& path);
std::vector<SeriesRow> read_series_csv(const std::string& path);

void write_certificates(const std::vector<Certificate>& certs,
                        const std::string& path);
std::vector<Certificate> read_certificates(const std::string& path);

}  // namespace finsler

#endif
