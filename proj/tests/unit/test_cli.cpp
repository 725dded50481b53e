#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(OPSK_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("opsk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

const char* kSweep =
    "distance = 0.1\n"
    "edge_ratio = 0.05\n"
    "flow_ratio = 1\n"
    "n_symbols = 400\n"
    "pn = 10\n"
    "sweep.allocation = 1,1,1 3,1,1\n"
    "sweep.quality = 0.5 1\n";

}  // namespace

TEST_F(Cli, ThresholdsPrintsBoundaries) {
  const Outcome o = run("thresholds --n 2");
  EXPECT_EQ(o.status, 0);
  EXPECT_EQ(o.out, "25,50,75\n");
  EXPECT_EQ(run("thresholds --n 9").status, 1);
}

TEST_F(Cli, SameSeedAnyThreadsSameBytes) {
  const fs::path cfg = write("c.cfg", kSweep);
  const std::string base = "ser2 --config " + cfg.string() + " --seed 7";
  ASSERT_EQ(run(base + " --threads 1 --out " + (dir_ / "a.csv").string()).status, 0);
  ASSERT_EQ(run(base + " --threads 1 --out " + (dir_ / "b.csv").string()).status, 0);
  ASSERT_EQ(run(base + " --threads 3 --out " + (dir_ / "c.csv").string()).status, 0);
  const std::string a = slurp(dir_ / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b.csv"));
  EXPECT_EQ(a, slurp(dir_ / "c.csv"));
  EXPECT_EQ(run(base + " --threads 2").out, a);
  EXPECT_NE(run("ser2 --config " + cfg.string() + " --seed 8").out, a);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "n_p,n_i,n_e,quality,ser,type1_errors,type2_errors,n_symbols,symbol_rate,"
            "mass_ratio,absorption_time,ser_type2_analytic");
}

TEST_F(Cli, UsageErrorsExitOne) {
  const fs::path cfg = write("c.cfg", kSweep);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("bogus").status, 1);
  EXPECT_EQ(run("ser1").status, 1);
  EXPECT_EQ(run("ser1 --config " + (dir_ / "missing.cfg").string()).status, 1);
  EXPECT_EQ(run("ser1 --config " + cfg.string() + " --threads 0").status, 1);
  EXPECT_EQ(run("rate --config " + write("e.cfg", "").string()).status, 1);
  EXPECT_EQ(run("rate --config " + write("u.cfg", "distance = 1\nspeed = 2\n").string()).status, 1);
  // pn is forced to zero in type-1 sweeps.
  EXPECT_EQ(run("ser1 --config " + write("p.cfg", "distance = 1\nedge_ratio = 0.1\nflow = 1\nsweep.pn = 1 2\n").string()).status, 1);
}

TEST_F(Cli, RuntimeErrorsExitTwo) {
  const fs::path cfg = write("c.cfg", kSweep);
  EXPECT_EQ(run("rate --config " + cfg.string() + " --out " + dir_.string()).status, 2);
  EXPECT_EQ(run("thresholds --n 1 --out " + (dir_ / "no" / "such" / "x").string()).status, 2);
}

TEST_F(Cli, MassRatioMonotoneAlongEdge) {
  const fs::path cfg = write("m.cfg",
                             "distance = 1\nflow = 0.1\nsweep.edge_ratio = 0.001 0.01 0.05 0.1\n");
  const Outcome o = run("mass-ratio --config " + cfg.string());
  ASSERT_EQ(o.status, 0);
  std::istringstream lines(o.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "edge_ratio,absorption_time,mass_ratio");
  double prev = 0.0;
  int rows = 0;
  while (std::getline(lines, line)) {
    const double r = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GT(r, prev);
    EXPECT_LE(r, 1.0);
    prev = r;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}
