#include "cli.hpp"
#include "sgfem/types.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;
using namespace sgfem::tools;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "sgfem");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sgfem_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, RejectsSingleLevel) {
  const Result r = run_args({"convergence", "--levels", "1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("levels"), std::string::npos);
}

TEST(Cli, RejectsUnknownSuite) { EXPECT_EQ(run_args({"verify", "--suite", "bogus"}).code, kExitUsage); }

TEST(Cli, RejectsBadValues) {
  EXPECT_EQ(run_args({"solve", "--dim", "4"}).code, kExitUsage);
  EXPECT_EQ(run_args({"solve", "--iota", "0"}).code, kExitUsage);
  EXPECT_EQ(run_args({"solve", "--iota", "2"}).code, kExitUsage);
  EXPECT_EQ(run_args({"solve", "--solver", "lu"}).code, kExitUsage);
  EXPECT_EQ(run_args({"solve", "--example", "wave"}).code, kExitUsage);
  EXPECT_EQ(run_args({"convergence", "--dim", "3", "--levels", "4"}).code, kExitUsage);
  EXPECT_EQ(run_args({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_args({}).code, kExitUsage);
}

TEST(Cli, HelpIsNotAnError) { EXPECT_EQ(run_args({"--help"}).code, kExitOk); }

TEST(Cli, DefaultSweeps) {
  RunConfig c;
  c.command = "convergence";
  EXPECT_EQ(iota_values(c), (std::vector<double>{1.0, 1e-2, 1e-4, 1e-6}));
  EXPECT_EQ(initial_resolution(c), 8);
  c.dim = 3;
  EXPECT_EQ(initial_resolution(c), 4);
  EXPECT_THROW(validate(c), sgfem::Error);  // 4, 8, ..., 64 with 5 levels is too fine
  c.allow_large = true;
  EXPECT_NO_THROW(validate(c));
}

TEST(Cli, ZeroLoadWritesZeroField) {
  const fs::path dir = scratch("zero");
  const Result r = run_args({"solve", "--n", "4", "--zero-load", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(s["energy"].get<double>(), 0.0);
  const std::string vtk = slurp(dir / "solution.vtk");
  const auto pos = vtk.find("VECTORS displacement double");
  ASSERT_NE(pos, std::string::npos);
  std::istringstream body(vtk.substr(vtk.find('\n', pos) + 1));
  // (n + 1)^2 points, padded to three components.
  for (int i = 0; i < 25 * 3; ++i) {
    double v = 1.0;
    body >> v;
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Cli, SolvePositiveEnergy) {
  const Result r = run_args({"solve", "--n", "8", "--iota", "1e-2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto s = nlohmann::json::parse(r.out);
  EXPECT_GT(s["energy"].get<double>(), 0.0);
  EXPECT_LE(s["relative_residual"].get<double>(), 1e-10);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  for (const fs::path& d : {a, b}) {
    ASSERT_EQ(run_args({"convergence", "--iota", "1e-2", "--levels", "3", "--solver", "direct", "--out", d.string()})
                  .code,
              kExitOk);
    ASSERT_EQ(run_args({"solve", "--n", "4", "--out", (d / "solve").string()}).code, kExitOk);
  }
  for (const char* f : {"convergence_smooth_d2_iota1e-02.csv", "convergence_smooth_d2_iota1e-02.md", "summary.json",
                        "solve/summary.json", "solve/solution.vtk"}) {
    const std::string x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
}

TEST(Cli, ConfigRoundTrip) {
  const fs::path a = scratch("config_a");
  ASSERT_EQ(run_args({"convergence", "--iota", "1", "--levels", "2", "--solver", "direct", "--out", a.string()}).code,
            kExitOk);
  // Re-running from the serialized config reproduces the table.
  auto cfg = nlohmann::json::parse(slurp(a / "config.json"));
  const fs::path b = scratch("config_b");
  cfg["out"] = b.string();
  const fs::path cfg_path = scratch("config.json");
  std::ofstream(cfg_path) << cfg.dump();
  ASSERT_EQ(run_args({"convergence", "--config", cfg_path.string()}).code, kExitOk);
  EXPECT_EQ(slurp(a / "convergence_smooth_d2_iota1e+00.csv"), slurp(b / "convergence_smooth_d2_iota1e+00.csv"));
  EXPECT_EQ(run_args({"solve", "--config", cfg_path.string()}).code, kExitUsage);
}

TEST(Cli, VerifyKornSuite) {
  const Result r = run_args({"verify", "--dim", "2", "--suite", "korn", "--samples", "5000"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("PASS korn d=2", 0), 0u) << r.out;
}
