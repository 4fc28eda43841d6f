#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccg/csv.hpp"
#include "ccg/zdd.hpp"
#include "ccg_cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures(CCG_FIXTURES_DIR);

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = ccg::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) {
  return (kFixtures / "scenarios" / (name + ".json")).string();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ccg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp_tree(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + slurp(f);
  return all;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = run({"optimize", "--help"});
  EXPECT_EQ(r.code, ccg::cli::kExitOk);
  EXPECT_NE(r.out.find("--rho"), std::string::npos);
  EXPECT_NE(r.out.find("--workers"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, ccg::cli::kExitOk);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, ccg::cli::kExitValidation);
  EXPECT_EQ(run({"optimize", "--scenario", scenario("two_link_leader"), "--bogus"}).code,
            ccg::cli::kExitValidation);
  EXPECT_EQ(run({"oracle"}).code, ccg::cli::kExitValidation);
  EXPECT_EQ(run({"oracle", "--example", "two_link", "--theta", "x"}).code, ccg::cli::kExitValidation);
  EXPECT_EQ(run({"oracle", "--example", "parallel_kinks", "--theta", "0.1"}).code,
            ccg::cli::kExitValidation);
}

TEST(Cli, MissingScenarioNamesThePath) {
  const auto r = run({"equilibrium", "--scenario", "/nonexistent/where.json"});
  EXPECT_EQ(r.code, ccg::cli::kExitValidation);
  EXPECT_NE(r.err.find("/nonexistent/where.json"), std::string::npos);
}

TEST(Cli, RuntimeFailureExitsTwo) {
  const auto dir = scratch("runtime");
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  const auto r = run({"build-zdd", "--net", (kFixtures / "networks" / "grid4_net.tntp").string(),
                      "--s", "1", "--t", "16", "--out", (blocker / "sub" / "c.zdd1").string()});
  EXPECT_EQ(r.code, ccg::cli::kExitRuntime);
  fs::remove_all(dir);
}

TEST(Cli, OracleClosedForms) {
  auto r = run({"oracle", "--example", "two_link", "--theta", "0.5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.5,0.5\n");
  r = run({"oracle", "--example", "parallel_kinks", "--theta", "2.125", "--n", "5", "--M", "4"});
  EXPECT_EQ(r.out, "0,0.25,0.75,0,0\n");
  EXPECT_NE(r.err.find("resolved config"), std::string::npos);
}

TEST(Cli, OracleScenarioGrid) {
  const auto r = run({"oracle", "--scenario", scenario("two_link_leader"), "--grid", "21"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto table = ccg::read_csv(in);
  ASSERT_EQ(table.rows.size(), 21U);
  EXPECT_NEAR(std::stod(table.rows[10][table.column("phi")]), 2.625, 1e-9);
  EXPECT_NEAR(std::stod(table.rows[20][table.column("phi")]), 7.0 / 3.0, 1e-9);
  const auto loads = run({"oracle", "--scenario", scenario("two_link_leader"), "--theta", "1,1"});
  EXPECT_EQ(loads.code, 0);
  EXPECT_NEAR(std::stod(loads.out.substr(0, loads.out.find(','))), 0.325, 1e-9);
}

TEST(Cli, BuildZddWritesReadableCache) {
  const auto dir = scratch("zdd");
  const auto path = dir / "grid.zdd1";
  const auto r = run({"build-zdd", "--net", (kFixtures / "networks" / "grid4_net.tntp").string(),
                      "--family", "st_paths", "--s", "1", "--t", "16", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto z = ccg::read_zdd(path);
  // Self-avoiding corner-to-corner paths on a 4x4 grid.
  EXPECT_EQ(*ccg::count(z).exact, 184U);
  EXPECT_NE(r.out.find("members=184"), std::string::npos);
  EXPECT_EQ(run({"build-zdd", "--net", (kFixtures / "networks" / "grid4_net.tntp").string(),
                 "--family", "st_paths", "--s", "1", "--out", path.string()})
                .code,
            ccg::cli::kExitValidation);
  fs::remove_all(dir);
}

TEST(Cli, EquilibriumTrace) {
  const auto dir = scratch("eq");
  const auto path = dir / "trace.csv";
  const auto r = run({"equilibrium", "--scenario", scenario("parallel_kinks"), "--T", "400",
                      "--gap-every", "100", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = ccg::read_csv_file(path);
  ASSERT_EQ(table.rows.size(), 400U);
  EXPECT_EQ(table.rows[98][table.column("gap")], "");
  EXPECT_NE(table.rows[99][table.column("gap")], "");
  EXPECT_LT(std::stod(table.rows.back()[table.column("gap")]), 1e-2);
  fs::remove_all(dir);
}

TEST(Cli, FixedSeedOutputsAreByteIdentical) {
  std::vector<std::vector<std::string>> commands{
      {"equilibrium", "--scenario", scenario("grid4_st_paths"), "--variant", "hl16", "--T", "100",
       "--seed", "4"},
      {"optimize", "--scenario", scenario("two_link_leader"), "--K", "5", "--T", "100", "--seed", "4",
       "--workers", "2"},
      {"bench", "--scenario", scenario("grid4_st_paths"), "--reps", "2", "--workers", "2", "--seed",
       "9"},
  };
  for (auto& cmd : commands) {
    std::vector<std::string> contents;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = scratch("repro" + std::to_string(rep));
      auto args = cmd;
      const bool bench = cmd[0] == "bench";
      args.insert(args.end(), {"--no-timing", "--log-level", "warn", "--out",
                               bench ? dir.string() : (dir / "out.csv").string()});
      const auto r = run(args);
      ASSERT_EQ(r.code, 0) << cmd[0] << ": " << r.err;
      contents.push_back(slurp_tree(dir));
      fs::remove_all(dir);
    }
    EXPECT_FALSE(contents[0].empty());
    EXPECT_EQ(contents[0], contents[1]) << cmd[0];
  }
}
