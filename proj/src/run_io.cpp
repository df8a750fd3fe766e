#include "finsler/run_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace finsler {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string snap_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06zu.fsnap", index);
  return buf;
}

void write_snapshot(const Snapshot& snap, const GridSpec& grid,
                    OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write snapshot file '" + path + "'");
  out << "finsler-snapshot 1\n";
  out << "nx1 " << grid.nx1 << "\n";
  out << "nx2 " << grid.nx2 << "\n";
  out << "ntheta " << grid.ntheta << "\n";
  out << "t " << fmt(snap.t) << "\n";
  out << "int_u0 " << fmt(snap.int_u0) << "\n";
  out << "fields phi:1 g:4 omega:4\n";
  out << "payload " << (format == OutputFormat::Binary ? "binary" : "text")
      << "\n";
  out << "end-header\n";

  auto write_field = [&](const HomogeneousField& f) {
    if (format == OutputFormat::Binary) {
      out.write(reinterpret_cast<const char*>(f.raw().data()),
                static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
    } else {
      for (double v : f.raw()) out << fmt(v) << "\n";
    }
  };
  write_field(snap.phi);
  write_field(snap.g);
  write_field(snap.omega);
  if (!out) throw IoError("short write on snapshot file '" + path + "'");
}

Snapshot read_snapshot(const std::string& path, GridSpec* grid_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing snapshot file '" + path + "'");

  std::map<std::string, std::string> header;
  std::string line;
  if (!std::getline(in, line) || line.rfind("finsler-snapshot", 0) != 0) {
    throw IoError("'" + path + "' is not a snapshot file");
  }
  while (std::getline(in, line)) {
    if (line == "end-header") break;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw IoError("malformed header in '" + path + "'");
    header[line.substr(0, sp)] = line.substr(sp + 1);
  }
  for (const char* key : {"nx1", "nx2", "ntheta", "t", "int_u0", "payload"}) {
    if (!header.count(key)) {
      throw IoError("snapshot '" + path + "' missing header key '" + key + "'");
    }
  }
  const GridSpec grid = GridSpec::make(std::stoi(header["nx1"]),
                                       std::stoi(header["nx2"]),
                                       std::stoi(header["ntheta"]));
  if (grid_out) *grid_out = grid;
  const bool binary = header["payload"] == "binary";

  Snapshot snap;
  snap.t = std::stod(header["t"]);
  snap.int_u0 = std::stod(header["int_u0"]);
  snap.phi = HomogeneousField::scalar(grid, 1);
  snap.g = HomogeneousField(grid, 0, {Var::Lower, Var::Lower});
  snap.omega = HomogeneousField(grid, 0, {Var::Lower, Var::Lower});

  auto read_field = [&](HomogeneousField& f) {
    if (binary) {
      in.read(reinterpret_cast<char*>(f.raw().data()),
              static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
      if (in.gcount() !=
          static_cast<std::streamsize>(f.raw().size() * sizeof(double))) {
        throw IoError("truncated snapshot payload in '" + path + "'");
      }
    } else {
      for (double& v : f.raw()) {
        if (!(in >> v)) {
          throw IoError("truncated snapshot payload in '" + path + "'");
        }
      }
    }
  };
  read_field(snap.phi);
  read_field(snap.g);
  read_field(snap.omega);
  return snap;
}

}  // namespace

void write_series_csv(const FlowRun& run, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write series file '" + path + "'");
  out << "t,dt,sup_ric,u0,u1,int_u0,convexity_margin\n";
  for (const SeriesRow& r : run.series) {
    out << fmt(r.t) << "," << fmt(r.dt) << "," << fmt(r.sup_ric) << ","
        << fmt(r.u0) << "," << fmt(r.u1) << "," << fmt(r.int_u0) << ","
        << fmt(r.margin) << "\n";
  }
}

std::vector<SeriesRow> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file '" + path + "'");
  std::vector<SeriesRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty series file '" + path + "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SeriesRow r;
    double* cols[] = {&r.t, &r.dt, &r.sup_ric, &r.u0, &r.u1, &r.int_u0, &r.margin};
    std::istringstream ls(line);
    std::string cell;
    for (double* col : cols) {
      if (!std::getline(ls, cell, ',')) {
        throw IoError("malformed series row in '" + path + "': " + line);
      }
      *col = std::strtod(cell.c_str(), nullptr);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_run(const FlowRun& run, const Scenario& scenario,
               const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory '" + dir + "': " + ec.message());

  {
    std::ofstream out(fs::path(dir) / "scenario.cfg");
    if (!out) throw IoError("cannot write scenario.cfg in '" + dir + "'");
    out << emit_scenario(scenario);
  }
  {
    std::ofstream out(fs::path(dir) / "status.txt");
    if (!out) throw IoError("cannot write status.txt in '" + dir + "'");
    out << "stop_reason " << to_string(run.stop) << "\n";
    out << "t_end " << fmt(run.t_end) << "\n";
    out << "accepted_steps " << run.accepted_steps << "\n";
    out << "snapshot_count " << run.snapshots.size() << "\n";
    out << "int_u0 " << fmt(run.int_u0) << "\n";
  }
  write_series_csv(run, (fs::path(dir) / "series.csv").string());
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    write_snapshot(run.snapshots[k], run.grid, scenario.format,
                   (fs::path(dir) / snap_name(k)).string());
  }
}

Scenario read_run_scenario(const std::string& dir) {
  const std::string path = (fs::path(dir) / "scenario.cfg").string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

FlowRun read_run(const std::string& dir) {
  const Scenario scenario = read_run_scenario(dir);

  std::map<std::string, std::string> status;
  {
    const std::string path = (fs::path(dir) / "status.txt").string();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto sp = line.find(' ');
      if (sp != std::string::npos) {
        status[line.substr(0, sp)] = line.substr(sp + 1);
      }
    }
  }
  for (const char* key : {"stop_reason", "t_end", "accepted_steps",
                          "snapshot_count", "int_u0"}) {
    if (!status.count(key)) {
      throw IoError("status.txt in '" + dir + "' missing key '" + key + "'");
    }
  }

  FlowRun run;
  run.grid = scenario.grid;
  run.mode = scenario.flow.mode;
  run.prescribed = scenario.flow.prescribed;
  run.horizon = scenario.flow.horizon;
  run.stop = stop_reason_from_string(status["stop_reason"]);
  run.t_end = std::stod(status["t_end"]);
  run.accepted_steps = std::stol(status["accepted_steps"]);
  run.int_u0 = std::stod(status["int_u0"]);

  const std::size_t count = std::stoul(status["snapshot_count"]);
  for (std::size_t k = 0; k < count; ++k) {
    const std::string path = (fs::path(dir) / snap_name(k)).string();
    GridSpec grid;
    run.snapshots.push_back(read_snapshot(path, &grid));
    if (!(grid == scenario.grid)) {
      throw IoError("snapshot '" + path + "' grid does not match scenario");
    }
    if (k > 0 && !(run.snapshots[k].t > run.snapshots[k - 1].t)) {
      throw IoError("snapshot times not strictly increasing at '" + path + "'");
    }
  }

  const std::string series_path = (fs::path(dir) / "series.csv").string();
  if (fs::exists(series_path)) run.series = read_series_csv(series_path);
  return run;
}

void write_certificates(const std::vector<Certificate>& certs,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write certificate file '" + path + "'");
  for (const Certificate& c : certs) {
    out << "certificate name=" << c.name << " pass=" << (c.pass ? 1 : 0)
        << " residual=" << fmt(c.residual) << " tolerance=" << fmt(c.tolerance)
        << " witness=" << c.witness << "\n";
  }
}

std::vector<Certificate> read_certificates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open certificate file '" + path + "'");
  std::vector<Certificate> certs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("certificate ", 0) != 0) continue;
    Certificate c;
    std::istringstream ls(line.substr(12));
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      std::string value = tok.substr(eq + 1);
      if (key == "name") c.name = value;
      else if (key == "pass") c.pass = value == "1";
      else if (key == "residual") c.residual = std::strtod(value.c_str(), nullptr);
      else if (key == "tolerance") c.tolerance = std::strtod(value.c_str(), nullptr);
      else if (key == "witness") {
        // witness is the tail of the line (may contain spaces)
        std::string rest;
        std::getline(ls, rest);
        c.witness = value + rest;
      }
    }
    certs.push_back(c);
  }
  return certs;
}

}  // namespace finsler
