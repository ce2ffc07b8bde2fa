#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  double seconds;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("symmax_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stderr folded into stdout.
Outcome cli(const std::string &args) {
  const fs::path log = scratch() / "log.txt";
  const std::string cmd = std::string("\"") + SYMMAX_CLI + "\" --scenario-dir \"" +
                          SYMMAX_SCENARIO_DIR + "\" " + args + " > \"" + log.string() +
                          "\" 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str(), secs};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Row {
  double t, hamiltonian, energy, div_b, div_d;
};

std::vector<Row> monitors(const fs::path &dir) {
  std::ifstream in(dir / "monitors.csv");
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't')
      continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.t, &r.hamiltonian, &r.energy,
                    &r.div_b, &r.div_d) == 5)
      rows.push_back(r);
  }
  return rows;
}

} // namespace

TEST(Cli, ListScenarios) {
  const auto r = cli("list-scenarios");
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char *name :
       {"vacuum_plane_wave", "luneburg_lens", "cylindrical_annulus", "uniaxial_pulse"})
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run no_such_scenario").code, 2);
  const auto r = cli("run vacuum_plane_wave --steps 0 --output-dir " +
                     (scratch() / "zero").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("steps >= 1 required (got 0)"), std::string::npos) << r.out;
}

TEST(Cli, BrokenScenarioFileReportsLocation) {
  const fs::path bad = scratch() / "bad.scenario";
  std::ofstream(bad) << "[scenario]\nname = bad\n[grid]\nn = 2, 8, 8\nextent = 1, 1, 1\n"
                        "[stepper]\ndt = 0.1\n[run]\nsteps = 2\n[medium]\nwat = 3\n";
  const auto r = cli("run \"" + bad.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.scenario:11:"), std::string::npos) << r.out;
}

TEST(Cli, CheckAllPasses) {
  const auto r = cli("check all");
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char *name : {"irregularity", "redundancy", "brackets", "adjoint"})
    EXPECT_NE(r.out.find(std::string("RESULT ") + name + " PASS"), std::string::npos)
        << name << "\n"
        << r.out;
}

TEST(Cli, CheckIrregularityPrintsHessian) {
  const auto r = cli("check irregularity");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("RESULT irregularity PASS"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("e+"), std::string::npos) << r.out;
}

TEST(Cli, CheckRedundancyOnCurvilinearScenario) {
  const auto r = cli("check redundancy cylindrical_annulus");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("RESULT redundancy PASS"), std::string::npos) << r.out;
}

TEST(Cli, PlaneWaveRunKeepsDivergenceAtRoundoff) {
  const fs::path dir = scratch() / "pw";
  const auto r = cli("run vacuum_plane_wave --output-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LT(r.seconds, 60.0);
  const auto rows = monitors(dir);
  ASSERT_EQ(rows.size(), 101u);
  for (const auto &row : rows) {
    EXPECT_LT(row.div_b, 1e-10);
    EXPECT_LT(row.div_d, 1e-10);
  }
  EXPECT_TRUE(fs::exists(dir / "snapshot_000000.csv"));
  EXPECT_TRUE(fs::exists(dir / "snapshot_001000.csv"));
  EXPECT_TRUE(fs::exists(dir / "snapshot_002000.csv"));
  const std::string head = slurp(dir / "monitors.csv").substr(0, 200);
  EXPECT_NE(head.find("# seed = "), std::string::npos) << head;
  EXPECT_NE(head.find("# prng = mt19937_64"), std::string::npos) << head;
}

TEST(Cli, LuneburgRunConservesEnergy) {
  const fs::path dir = scratch() / "lens";
  const auto r = cli("run luneburg_lens --snapshot-every 0 --output-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LT(r.seconds, 60.0);
  const auto rows = monitors(dir);
  ASSERT_GE(rows.size(), 2u);
  const double e0 = rows.front().energy;
  ASSERT_GT(e0, 0.0);
  for (const auto &row : rows)
    EXPECT_LE(std::abs(row.energy - e0), 0.01 * e0) << row.t;
}

TEST(Cli, OtherShippedScenariosRun) {
  for (const char *name : {"cylindrical_annulus", "uniaxial_pulse"}) {
    const fs::path dir = scratch() / name;
    const auto r = cli(std::string("run ") + name + " --snapshot-every 0 --output-dir " +
                       dir.string());
    EXPECT_EQ(r.code, 0) << name << "\n" << r.out;
    EXPECT_LT(r.seconds, 60.0) << name;
    EXPECT_NE(r.out.find("final t="), std::string::npos) << r.out;
  }
}

TEST(Cli, SameSeedSameBytes) {
  const fs::path a = scratch() / "det_a", b = scratch() / "det_b", c = scratch() / "det_c";
  const std::string common = "run luneburg_lens --steps 10 --snapshot-every 5 --output-dir ";
  ASSERT_EQ(cli(common + a.string()).code, 0);
  ASSERT_EQ(cli(common + b.string()).code, 0);
  ASSERT_EQ(cli(common + c.string() + " --seed 99").code, 0);
  EXPECT_EQ(slurp(a / "monitors.csv"), slurp(b / "monitors.csv"));
  EXPECT_EQ(slurp(a / "snapshot_000010.csv"), slurp(b / "snapshot_000010.csv"));
  EXPECT_NE(slurp(a / "monitors.csv"), slurp(c / "monitors.csv"));
}

TEST(Cli, BlowUpExitsThree) {
  const auto r = cli("run vacuum_plane_wave --dt 10 --steps 500 --snapshot-every 0 "
                     "--output-dir " +
                     (scratch() / "boom").string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("step"), std::string::npos) << r.out;
}

TEST(Cli, MidpointDivergenceExitsThree) {
  const auto r = cli("run vacuum_plane_wave --method implicit_midpoint --dt 10 --steps 5 "
                     "--snapshot-every 0 --output-dir " +
                     (scratch() / "diverge").string());
  EXPECT_EQ(r.code, 3) << r.out;
}
