// fstefan: solve a one-phase fractional melting problem from a config file,
// write CSV trajectories and an audit report.
//
// exit codes: 0 ok, 2 config or output error, 3 solver failure,
//             4 conservation breach in the audit report

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fstefan/config.hpp"
#include "fstefan/io.hpp"
#include "fstefan/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kConservationBreach = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fstefan::ConfigError("", "cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional one-phase Stefan solver and auditor"};
  std::string config_path;
  std::string audit_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "key=value run configuration")->required();
  app.add_option("--audit-only", audit_dir,
                 "skip the solve; re-read front.csv and fields_*.csv from this directory "
                 "and write audit.txt to out_dir");
  app.add_flag("--quiet", quiet, "print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  fstefan::RunConfig cfg;
  try {
    cfg = fstefan::parse_config(slurp(config_path));
    fstefan::effective_params(cfg).validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  fstefan::SolutionRecord rec;
  try {
    if (audit_dir.empty()) {
      rec = fstefan::produce_record(cfg);
    } else {
      rec = fstefan::ingest_trajectory(audit_dir, fstefan::effective_params(cfg),
                                       fstefan::effective_data(cfg));
    }
  } catch (const fstefan::ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fstefan::TrajectoryError& e) {
    std::cerr << "trajectory error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fstefan::ConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const fstefan::ClosureError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  }

  const fstefan::ResidualReport report = fstefan::run_audits(rec, cfg.audits, fstefan::solves(cfg));
  try {
    if (audit_dir.empty()) {
      fstefan::emit_outputs(rec, report, cfg);
    } else {
      // The report goes to out_dir so it can be compared with the original.
      std::error_code ec;
      std::filesystem::create_directories(cfg.out_dir, ec);
      fstefan::write_audit(report, std::filesystem::path(cfg.out_dir) / "audit.txt");
    }
  } catch (const fstefan::OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kConfigError;
  }

  if (!quiet) {
    std::printf("t=%.6g s=%.6g steps=%zu%s\n", rec.grid[rec.last()], rec.path.current(), rec.last(),
                rec.reached_boundary ? " (front reached L)" : "");
    for (const auto& e : report.entries) {
      std::printf("%-28s %-6s %.6e %s\n", e.name.c_str(), e.norm.c_str(), e.value,
                  std::string(fstefan::to_string(e.verdict)).c_str());
    }
  }
  if (fstefan::conservation_breach(report)) {
    std::cerr << "conservation breach: see audit.txt\n";
    return kConservationBreach;
  }
  return kOk;
}
