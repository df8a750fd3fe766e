#ifndef FINSLER_SCENARIO_HPP
#define FINSLER_SCENARIO_HPP

#include <string>

#include "finsler/flow.hpp"

namespace finsler {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { Binary, Text };

/// One reproducible experiment: key = value sections, exhaustive schema,
/// unknown keys rejected.
struct Scenario {
  std::string family;
  MetricParams metric_params;
  GridSpec grid;
  FlowConfig flow;
  std::string out_dir;
  OutputFormat format = OutputFormat::Binary;
  double certificate_tol = 1e-3;
  double fbar_tol = 1e-5;

  bool operator==(const Scenario& other) const;
};

/// Parses a scenario document. Errors name the offending line.
Scenario parse_scenario(const std::string& text,
                        const std::string& source_name = "scenario");

/// Canonical text form; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);

Scenario load_scenario_file(const std::string& path);

}  // namespace finsler

#endif
