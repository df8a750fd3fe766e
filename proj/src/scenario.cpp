#include "finsler/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace finsler {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& what) {
  throw ScenarioError(src + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const RawEntry& e, const std::string& src) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    fail(src, e.line, "value of '" + e.key + "' is not a number: '" + e.value + "'");
  }
}

int parse_int(const RawEntry& e, const std::string& src) {
  const double v = parse_double(e, src);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    fail(src, e.line, "value of '" + e.key + "' is not an integer: '" + e.value + "'");
  }
  return i;
}

}  // namespace

bool Scenario::operator==(const Scenario& other) const {
  return family == other.family && metric_params == other.metric_params &&
         grid == other.grid && flow.mode == other.flow.mode &&
         flow.prescribed.c == other.flow.prescribed.c &&
         flow.horizon == other.flow.horizon && flow.dt_max == other.flow.dt_max &&
         flow.c_cfl == other.flow.c_cfl && flow.eps_conv == other.flow.eps_conv &&
         flow.r_max == other.flow.r_max &&
         flow.snapshot_every == other.flow.snapshot_every &&
         flow.fiber_mode_cut == other.flow.fiber_mode_cut &&
         out_dir == other.out_dir && format == other.format &&
         certificate_tol == other.certificate_tol && fbar_tol == other.fbar_tol;
}

Scenario parse_scenario(const std::string& text, const std::string& src) {
  std::vector<RawEntry> entries;
  {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(src, lineno, "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section != "metric" && section != "grid" && section != "flow" &&
            section != "output" && section != "tolerances") {
          fail(src, lineno, "unknown section '" + section + "'");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(src, lineno, "expected key = value");
      if (section.empty()) fail(src, lineno, "key outside any section");
      RawEntry e;
      e.section = section;
      e.key = trim(line.substr(0, eq));
      e.value = trim(line.substr(eq + 1));
      e.line = lineno;
      if (e.key.empty()) fail(src, lineno, "empty key");
      if (e.value.empty()) fail(src, lineno, "empty value for '" + e.key + "'");
      entries.push_back(e);
    }
  }

  Scenario s;
  std::optional<int> nx1, nx2, ntheta;
  std::optional<double> horizon;
  std::optional<std::string> mode;
  bool have_family = false;

  for (const RawEntry& e : entries) {
    if (e.section == "metric") {
      if (e.key == "family") {
        s.family = e.value;
        have_family = true;
      } else {
        s.metric_params[e.key] = parse_double(e, src);
      }
    } else if (e.section == "grid") {
      if (e.key == "nx1") nx1 = parse_int(e, src);
      else if (e.key == "nx2") nx2 = parse_int(e, src);
      else if (e.key == "ntheta") ntheta = parse_int(e, src);
      else fail(src, e.line, "unknown key '" + e.key + "' in [grid]");
    } else if (e.section == "flow") {
      if (e.key == "mode") mode = e.value;
      else if (e.key == "horizon") horizon = parse_double(e, src);
      else if (e.key == "dt_max") s.flow.dt_max = parse_double(e, src);
      else if (e.key == "c_cfl") s.flow.c_cfl = parse_double(e, src);
      else if (e.key == "eps_conv") s.flow.eps_conv = parse_double(e, src);
      else if (e.key == "r_max") s.flow.r_max = parse_double(e, src);
      else if (e.key == "snapshot_every") s.flow.snapshot_every = parse_int(e, src);
      else if (e.key == "fiber_mode_cut") s.flow.fiber_mode_cut = parse_int(e, src);
      else if (e.key == "c") s.flow.prescribed.c = parse_double(e, src);
      else fail(src, e.line, "unknown key '" + e.key + "' in [flow]");
    } else if (e.section == "output") {
      if (e.key == "directory") s.out_dir = e.value;
      else if (e.key == "format") {
        if (e.value == "binary") s.format = OutputFormat::Binary;
        else if (e.value == "text") s.format = OutputFormat::Text;
        else fail(src, e.line, "format must be 'binary' or 'text'");
      } else {
        fail(src, e.line, "unknown key '" + e.key + "' in [output]");
      }
    } else if (e.section == "tolerances") {
      if (e.key == "certificate") s.certificate_tol = parse_double(e, src);
      else if (e.key == "fbar") s.fbar_tol = parse_double(e, src);
      else fail(src, e.line, "unknown key '" + e.key + "' in [tolerances]");
    }
  }

  if (!have_family) throw ScenarioError(src + ": missing required key 'family' in [metric]");
  if (!nx1 || !nx2 || !ntheta) {
    throw ScenarioError(src + ": [grid] must set nx1, nx2 and ntheta");
  }
  if (!horizon) throw ScenarioError(src + ": missing required key 'horizon' in [flow]");

  try {
    validate_zoo_request(s.family, s.metric_params);
    s.grid = GridSpec::make(*nx1, *nx2, *ntheta);
  } catch (const ConfigError& e) {
    throw ScenarioError(src + ": " + e.what());
  }

  s.flow.horizon = *horizon;
  if (mode) {
    try {
      s.flow.mode = flow_mode_from_string(*mode);
    } catch (const ConfigError& e) {
      throw ScenarioError(src + ": " + e.what());
    }
  }
  if (!(s.flow.horizon > 0.0)) {
    throw ScenarioError(src + ": horizon must be positive, got " +
                        fmt(s.flow.horizon));
  }
  if (!(s.flow.dt_max > 0.0) || !(s.flow.c_cfl > 0.0) ||
      !(s.flow.eps_conv > 0.0) || !(s.flow.r_max > 0.0)) {
    throw ScenarioError(src + ": dt_max, c_cfl, eps_conv and r_max must be positive");
  }
  if (s.flow.snapshot_every < 1) {
    throw ScenarioError(src + ": snapshot_every must be >= 1");
  }
  return s;
}

std::string emit_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[metric]\n";
  os << "family = " << s.family << "\n";
  for (const auto& [key, value] : s.metric_params) {
    os << key << " = " << fmt(value) << "\n";
  }
  os << "\n[grid]\n";
  os << "nx1 = " << s.grid.nx1 << "\n";
  os << "nx2 = " << s.grid.nx2 << "\n";
  os << "ntheta = " << s.grid.ntheta << "\n";
  os << "\n[flow]\n";
  os << "mode = " << to_string(s.flow.mode) << "\n";
  os << "horizon = " << fmt(s.flow.horizon) << "\n";
  os << "dt_max = " << fmt(s.flow.dt_max) << "\n";
  os << "c_cfl = " << fmt(s.flow.c_cfl) << "\n";
  os << "eps_conv = " << fmt(s.flow.eps_conv) << "\n";
  os << "r_max = " << fmt(s.flow.r_max) << "\n";
  os << "snapshot_every = " << s.flow.snapshot_every << "\n";
  os << "fiber_mode_cut = " << s.flow.fiber_mode_cut << "\n";
  os << "c = " << fmt(s.flow.prescribed.c) << "\n";
  os << "\n[output]\n";
  if (!s.out_dir.empty()) os << "directory = " << s.out_dir << "\n";
  os << "format = " << (s.format == OutputFormat::Binary ? "binary" : "text")
     << "\n";
  os << "\n[tolerances]\n";
  os << "certificate = " << fmt(s.certificate_tol) << "\n";
  os << "fbar = " << fmt(s.fbar_tol) << "\n";
  return os.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace finsler
