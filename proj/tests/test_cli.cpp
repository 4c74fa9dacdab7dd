#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FSTEFAN_CLI
#error "FSTEFAN_CLI must name the fstefan binary"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / ("fstefan_cli_" + std::string(info->name()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs the binary with the given arguments; stdout and stderr go to `log`.
int invoke(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(FSTEFAN_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string melting(const fs::path& out, int stride) {
  return "beta=0.5\nlength=1\nx0=0.2\nt_end=0.5\nnx=40\nnt=40\nbc_kind=dirichlet\nbc_value=0.5\n"
         "t0_kind=linear\nt0_value=0.5\nout_dir=" +
         out.string() + "\nsnapshot_stride=" + std::to_string(stride) + "\n";
}

}  // namespace

TEST(Cli, ValidRunExitsZeroAndWritesOutputs) {
  const fs::path dir = scratch();
  const fs::path cfg = write_config(dir, "run.txt", melting(dir / "out", 10));
  EXPECT_EQ(invoke("--config " + cfg.string(), dir / "log"), 0) << slurp(dir / "log");
  for (const char* name : {"config.txt", "front.csv", "audit.txt", "fields_0000.csv", "fields_0040.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
  }
  EXPECT_NE(slurp(dir / "log").find("balance_residual"), std::string::npos);
  EXPECT_EQ(invoke("--quiet --config " + cfg.string(), dir / "log"), 0);
  EXPECT_EQ(slurp(dir / "log"), "");
}

TEST(Cli, MissingConfigFlagPrintsUsage) {
  const fs::path dir = scratch();
  EXPECT_EQ(invoke("", dir / "log"), 2);
  EXPECT_NE(slurp(dir / "log").find("--config"), std::string::npos);
  EXPECT_EQ(invoke("--bogus --config x", dir / "log"), 2);
}

TEST(Cli, BadConfigsExitTwo) {
  const fs::path dir = scratch();
  EXPECT_EQ(invoke("--config " + (dir / "absent.txt").string(), dir / "log"), 2);
  const fs::path bad = write_config(dir, "bad.txt", "beta=1.2\n" + melting(dir / "out", 10).substr(9));
  EXPECT_EQ(invoke("--config " + bad.string(), dir / "log"), 2);
  EXPECT_NE(slurp(dir / "log").find("beta"), std::string::npos);
  const fs::path dup = write_config(dir, "dup.txt", melting(dir / "out", 10) + "nx=20\n");
  EXPECT_EQ(invoke("--config " + dup.string(), dir / "log"), 2);
}

TEST(Cli, UnwritableOutputExitsTwo) {
  const fs::path dir = scratch();
  std::ofstream(dir / "blocker") << "x";
  const fs::path cfg = write_config(dir, "run.txt", melting(dir / "blocker" / "out", 10));
  EXPECT_EQ(invoke("--config " + cfg.string(), dir / "log"), 2);
}

TEST(Cli, AuditOnlyReproducesAudit) {
  const fs::path dir = scratch();
  const fs::path run_cfg = write_config(dir, "run.txt", melting(dir / "out", 1));
  ASSERT_EQ(invoke("--config " + run_cfg.string(), dir / "log"), 0) << slurp(dir / "log");
  const fs::path audit_cfg = write_config(dir, "audit.txt", melting(dir / "reaudit", 1));
  EXPECT_EQ(invoke("--config " + audit_cfg.string() + " --audit-only " + (dir / "out").string(), dir / "log"), 0)
      << slurp(dir / "log");
  EXPECT_EQ(slurp(dir / "reaudit" / "audit.txt"), slurp(dir / "out" / "audit.txt"));
  EXPECT_EQ(invoke("--config " + audit_cfg.string() + " --audit-only " + (dir / "nowhere").string(), dir / "log"),
            2);
}

TEST(Cli, RunsAreByteIdentical) {
  const fs::path dir = scratch();
  const fs::path a = write_config(dir, "a.txt", melting(dir / "a", 7));
  const fs::path b = write_config(dir, "b.txt", melting(dir / "b", 7));
  ASSERT_EQ(invoke("--quiet --config " + a.string(), dir / "log"), 0);
  ASSERT_EQ(invoke("--quiet --config " + b.string(), dir / "log"), 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const std::string name = e.path().filename().string();
    if (name == "config.txt") continue;  // differs in out_dir only
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 9u);
}

TEST(Cli, ManufacturedCases) {
  const fs::path dir = scratch();
  const fs::path q = write_config(dir, "q.txt",
                                  "beta=0.5\nt_end=1\nnx=40\nnt=80\nmms_case=quadratic-front\nout_dir=" +
                                      (dir / "q").string() + "\n");
  EXPECT_EQ(invoke("--config " + q.string(), dir / "log"), 0) << slurp(dir / "log");
  EXPECT_NE(slurp(dir / "q" / "audit.txt").find("dc_mismatch"), std::string::npos);
  const fs::path f = write_config(dir, "f.txt",
                                  "beta=0.5\nt_end=1\nnx=40\nnt=80\nmms_case=frozen-front\nout_dir=" +
                                      (dir / "f").string() + "\n");
  EXPECT_EQ(invoke("--config " + f.string(), dir / "log"), 0) << slurp(dir / "log");
}
