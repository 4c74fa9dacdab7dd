#pragma once

// CSV serialization of a solution record and its audit report, and the
// reverse ingestion used by audit-only runs.
//
//   front.csv          t,s,sdot,balance_residual      one row per step
//   fields_NNNN.csv    x,T,E,q_face_left              one row per cell
//   audit.txt          name,norm,value,verdict        one row per check
//   config.txt         the effective configuration
//
// Reals use %.17g, lines end in LF, each file starts with its header.
// Snapshots are written every `stride` steps and at the final step. An
// ingested record holds only the snapshot steps, so audits of a re-read
// trajectory match the original run bit for bit only when stride = 1.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fstefan/config.hpp"
#include "fstefan/solver.hpp"
#include "fstefan/verify.hpp"

namespace fstefan {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt(double v) { return real_text(v); }

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  out << body;
  if (!out) throw OutputError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrajectoryError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string snapshot_name(std::size_t n) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "fields_%04zu.csv", n);
  return buf.data();
}

// Rows of a CSV with the given header; every row must have header-many reals.
inline std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                                 std::string_view header) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  bool first = true;
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  while (pos < text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    if (first) {
      if (line != header) throw TrajectoryError(path.string() + ": expected header " + std::string(header));
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t p = 0;
    while (p <= line.size()) {
      const auto comma = std::min(line.find(',', p), line.size());
      try {
        row.push_back(parse_real("csv", line.substr(p, comma - p)));
      } catch (const ConfigError&) {
        throw TrajectoryError(path.string() + ": malformed number in '" + std::string(line) + "'");
      }
      p = comma + 1;
    }
    if (row.size() != columns) throw TrajectoryError(path.string() + ": wrong column count");
    rows.push_back(std::move(row));
  }
  if (first) throw TrajectoryError(path.string() + ": empty file");
  return rows;
}

}  // namespace detail

inline std::string front_csv(const SolutionRecord& rec) {
  std::string out = "t,s,sdot,balance_residual\n";
  for (std::size_t n = 0; n <= rec.last(); ++n) {
    const double sdot =
        n == 0 ? 0.0 : (rec.path.position(n) - rec.path.position(n - 1)) / rec.grid.dt(n);
    out += detail::fmt(rec.grid[n]) + ',' + detail::fmt(rec.path.position(n)) + ',' +
           detail::fmt(sdot) + ',' + detail::fmt(rec.balance_residual[n]) + '\n';
  }
  return out;
}

inline std::string fields_csv(const SolutionRecord& rec, std::size_t n) {
  std::string out = "x,T,E,q_face_left\n";
  for (std::size_t i = 0; i < rec.space.cells; ++i) {
    out += detail::fmt(rec.space.center(i)) + ',' + detail::fmt(rec.temperature[n][i]) + ',' +
           detail::fmt(rec.enthalpy[n][i]) + ',' + detail::fmt(rec.flux[n][i]) + '\n';
  }
  return out;
}

inline std::string audit_text(const ResidualReport& report) {
  std::string out = "name,norm,value,verdict\n";
  for (const auto& e : report.entries) {
    out += e.name + ',' + e.norm + ',' + detail::fmt(e.value) + ',' + std::string(to_string(e.verdict)) + '\n';
  }
  return out;
}

/// Step indices that get a field snapshot: 0, stride, 2 stride, ..., last.
inline std::vector<std::size_t> snapshot_steps(std::size_t last, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("snapshot stride must be >= 1");
  std::vector<std::size_t> steps;
  for (std::size_t n = 0; n <= last; n += stride) steps.push_back(n);
  if (steps.back() != last) steps.push_back(last);
  return steps;
}

/// Writes config.txt, front.csv, the field snapshots and audit.txt.
inline void emit_outputs(const SolutionRecord& rec, const ResidualReport& report, const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir.string());
  }
  // Stale snapshots from an earlier run with another stride would be ingested.
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("fields_") && name.ends_with(".csv")) std::filesystem::remove(entry.path());
  }
  detail::write_file(dir / "config.txt", emit_config(cfg));
  detail::write_file(dir / "front.csv", front_csv(rec));
  for (const std::size_t n : snapshot_steps(rec.last(), cfg.snapshot_stride)) {
    detail::write_file(dir / detail::snapshot_name(n), fields_csv(rec, n));
  }
  detail::write_file(dir / "audit.txt", audit_text(report));
}

inline void write_audit(const ResidualReport& report, const std::filesystem::path& path) {
  detail::write_file(path, audit_text(report));
}

/// Rebuilds a record from a directory written by emit_outputs. `params` and
/// `data` must describe the same problem; the time grid is the set of
/// snapshot times, and gradients and sources are recomputed from T.
inline SolutionRecord ingest_trajectory(const std::filesystem::path& dir, const ModelParams& params,
                                        const ProblemData& data) {
  const auto front = detail::read_csv(dir / "front.csv", "t,s,sdot,balance_residual");
  if (front.empty()) throw TrajectoryError("front.csv has no rows");
  std::vector<std::size_t> steps;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!(name.starts_with("fields_") && name.ends_with(".csv"))) continue;
    const std::string digits = name.substr(7, name.size() - 11);
    try {
      steps.push_back(detail::parse_count("snapshot", digits));
    } catch (const ConfigError&) {
      throw TrajectoryError("bad snapshot file name " + name);
    }
  }
  if (ec) throw TrajectoryError("cannot list " + dir.string());
  std::sort(steps.begin(), steps.end());
  if (steps.empty() || steps.front() != 0 || steps.back() + 1 != front.size()) {
    throw TrajectoryError("snapshots must include step 0 and the last step of front.csv");
  }

  SolutionRecord rec;
  rec.params = params;
  rec.data = data;
  if (!rec.data.boundary || !rec.data.initial) {
    const ProblemData defaults = standard_data(params);
    if (!rec.data.boundary) rec.data.boundary = defaults.boundary;
    if (!rec.data.initial) rec.data.initial = defaults.initial;
  }
  rec.space = {params.length, params.nx};
  std::vector<double> times;
  for (const std::size_t n : steps) times.push_back(front[n][0]);
  rec.grid = steps.size() > 1 ? TimeGrid(times) : TimeGrid(params.t_end, 1);

  const SpaceGrid& g = rec.space;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const std::size_t n = steps[k];
    const auto rows = detail::read_csv(dir / detail::snapshot_name(n), "x,T,E,q_face_left");
    if (rows.size() != g.cells) throw TrajectoryError(detail::snapshot_name(n) + ": wrong cell count");
    std::vector<double> temp(g.cells), enth(g.cells), flux(g.faces(), 0.0), src(g.cells, 0.0);
    for (std::size_t i = 0; i < g.cells; ++i) {
      temp[i] = rows[i][1];
      enth[i] = rows[i][2];
      flux[i] = rows[i][3];
      if (k > 0 && rec.data.cumulative_source) {
        src[i] = rec.data.cumulative_source(g.face(i), g.face(i + 1), times[k]);
      }
    }
    const double s = front[n][1];
    rec.gradient.push_back(face_gradients(rec.params, rec.data, g, temp, times[k]));
    rec.temperature.push_back(std::move(temp));
    rec.fronts.push_back(rec.data.pin_front ? front_from_position(g, params.x0)
                                            : temperature_from_enthalpy(enth).front);
    rec.enthalpy.push_back(std::move(enth));
    rec.flux.push_back(std::move(flux));
    rec.source.push_back(std::move(src));
    rec.balance_residual.push_back(front[n][3]);
    rec.iterations.push_back(0);
    if (k == 0) rec.path = InterfacePath(times[0], s); else rec.path.push_back(times[k], s);
  }
  rec.reached_boundary = !rec.data.pin_front && rec.fronts.back().cell >= g.cells;
  return rec;
}

}  // namespace fstefan
