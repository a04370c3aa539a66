#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fracheat/runner.hpp"

namespace {

using namespace fracheat;
using runner::CliArgs;
namespace fs = std::filesystem;

class RunnerTest : public ::testing::Test {
protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("fracheat_runner_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string config(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    io::write_file(p, text);
    return p.string();
  }

  int run(const std::string& sub, const std::optional<std::string>& cfg, const std::string& out,
          std::vector<std::string> runs = {}) {
    CliArgs a;
    a.subcommand = sub;
    a.config = cfg;
    a.out = (root_ / out).string();
    a.runs = std::move(runs);
    std::ostringstream o, e;
    const int rc = runner::run(a, o, e);
    stdout_ = o.str();
    stderr_ = e.str();
    return rc;
  }

  std::string file(const std::string& rel) { return io::read_file(root_ / rel); }
  io::json json_file(const std::string& rel) { return io::json::parse(file(rel)); }

  fs::path root_;
  std::string stdout_, stderr_;
};

const char* kSmallEstimate =
    R"({"seed_base": 7, "solver": {"points": 128, "horizon": 0.2, "paths": 40, "zero_mode": "compensated"},
        "estimator": {"space_lags": [4, 5, 6, 8, 11, 16], "space_window": [4, 16],
                      "time_lags": [4, 6, 8, 11, 16], "time_window": [4, 16]}})";

TEST_F(RunnerTest, BetaOutOfRangeExitsTwoNamingTheField) {
  EXPECT_EQ(run("estimate", config("c.json", R"({"model": {"beta": 1.5}})"), "o"), 2);
  EXPECT_NE(stderr_.find("model.beta"), std::string::npos) << stderr_;
}

TEST_F(RunnerTest, UnknownFieldsAndWrongTypesAreRejected) {
  EXPECT_EQ(run("simulate", config("a.json", R"({"solver": {"pionts": 64}})"), "o"), 2);
  EXPECT_NE(stderr_.find("solver.pionts"), std::string::npos) << stderr_;
  EXPECT_EQ(run("simulate", config("b.json", R"({"solver": {"dt": "small"}})"), "o"), 2);
  EXPECT_NE(stderr_.find("solver.dt"), std::string::npos) << stderr_;
  EXPECT_EQ(run("simulate", config("c.json", R"({"model": {"sigma": {"kind": "cubic"}}})"), "o"), 2);
  EXPECT_NE(stderr_.find("model.sigma.kind"), std::string::npos) << stderr_;
}

TEST_F(RunnerTest, MalformedJsonReportsLineAndColumn) {
  EXPECT_EQ(run("kernel", config("bad.json", "{\n  \"kernel\": {\"alpha\": 1.5,,}\n}"), "o"), 2);
  EXPECT_NE(stderr_.find("bad.json:2:"), std::string::npos) << stderr_;
}

TEST_F(RunnerTest, TimeLagsPastTheHorizonAreAConfigError) {
  EXPECT_EQ(run("simulate", config("c.json", R"({"solver": {"points": 64, "horizon": 0.05}})"), "o"), 2);
  EXPECT_NE(stderr_.find("estimator.time_lags"), std::string::npos) << stderr_;
}

TEST_F(RunnerTest, MissingConfigAndUnknownSubcommandExitTwo) {
  EXPECT_EQ(run("simulate", std::nullopt, "o"), 2);
  EXPECT_EQ(run("plot", config("c.json", "{}"), "o"), 2);
  EXPECT_EQ(run("noise", std::nullopt, "o"), 2);
}

TEST_F(RunnerTest, KernelRunWritesArtifactsAndManifest) {
  ASSERT_EQ(run("kernel", config("k.json", R"({"kernel": {"alpha": 1.2, "times": [0.5, 2]}})"), "k"), 0) << stderr_;
  const auto m = json_file("k/manifest.json");
  EXPECT_EQ(m["subcommand"], "kernel");
  EXPECT_EQ(m["seed_base"].get<std::uint64_t>(), runner::kDefaultSeed);
  EXPECT_TRUE(m["artifacts"].contains("kernel.csv"));
  EXPECT_EQ(m["artifacts"]["kernel.csv"], io::hex64(io::fnv1a(file("k/kernel.csv"))));
  EXPECT_EQ(file("k/kernel.csv").substr(0, 20), "t,x,p,bound_ratio\n0.");
}

TEST_F(RunnerTest, ResolvedConfigRoundTrips) {
  const auto c = runner::parse_config_text(kSmallEstimate);
  const auto j = runner::resolved_json(c);
  EXPECT_EQ(runner::resolved_json(runner::parse_config(j)).dump(), j.dump());
  EXPECT_EQ(j["solver"]["snapshot_times"].size(), 7u);
  EXPECT_DOUBLE_EQ(j["estimator"]["burn_in"].get<double>(), 0.1);
}

TEST_F(RunnerTest, DefaultSpaceLagsStayInsideTheWindow) {
  const auto c = runner::parse_config_text("{}");
  const auto lags = runner::space_lag_steps(c);
  ASSERT_FALSE(lags.empty());
  EXPECT_EQ(lags.front(), 4);
  EXPECT_LE(lags.back(), static_cast<long>(c.solver.grid.points / 8));
  EXPECT_TRUE(std::is_sorted(lags.begin(), lags.end()));
}

TEST_F(RunnerTest, SameConfigAndSeedGiveByteIdenticalCsv) {
  const auto cfg = config("e.json", kSmallEstimate);
  run("simulate", cfg, "a");
  run("simulate", cfg, "b");
  EXPECT_EQ(file("a/fields.csv"), file("b/fields.csv"));
  EXPECT_EQ(file("a/moments.csv"), file("b/moments.csv"));
  EXPECT_EQ(file("a/manifest.json"), file("b/manifest.json"));

  CliArgs a;
  a.subcommand = "simulate";
  a.config = cfg;
  a.seed = 8;
  a.out = (root_ / "c").string();
  std::ostringstream sink;
  runner::run(a, sink, sink);
  EXPECT_NE(file("a/fields.csv"), file("c/fields.csv"));
  EXPECT_EQ(json_file("c/manifest.json")["seed_base"].get<std::uint64_t>(), 8u);
}

TEST_F(RunnerTest, ThreadCountDoesNotChangeArtifacts) {
  run("simulate", config("t1.json", R"({"threads": 1, "solver": {"points": 64, "horizon": 0.2, "paths": 40}})"),
      "one");
  run("simulate", config("t3.json", R"({"threads": 3, "solver": {"points": 64, "horizon": 0.2, "paths": 40}})"),
      "three");
  EXPECT_EQ(file("one/fields.csv"), file("three/fields.csv"));
  EXPECT_EQ(file("one/moments.csv"), file("three/moments.csv"));
}

TEST_F(RunnerTest, ManifestConfigReproducesTheRun) {
  run("estimate", config("e.json", kSmallEstimate), "first");
  const auto m = json_file("first/manifest.json");
  const auto again = config("again.json", m["config"].dump());
  run("estimate", again, "second");
  EXPECT_EQ(file("first/moments.csv"), file("second/moments.csv"));
  EXPECT_EQ(file("first/oracle.csv"), file("second/oracle.csv"));
  EXPECT_EQ(json_file("second/manifest.json")["config_hash"], m["config_hash"]);
}

TEST_F(RunnerTest, EstimateWritesFitsChecksAndOracle) {
  const int rc = run("estimate", config("e.json", kSmallEstimate), "e");
  const auto res = json_file("e/results.json");
  ASSERT_EQ(res["checks"].size(), 4u);
  bool all = true;
  for (const auto& c : res["checks"]) {
    EXPECT_TRUE(c["details"].contains("margin"));
    const bool applicable = c["details"]["applicable"].get<double>() != 0.0;
    if (applicable && !c["pass"].get<bool>()) all = false;
  }
  EXPECT_EQ(rc, all ? 0 : 1);
  EXPECT_EQ(res["fits"].size(), 4u);
  EXPECT_TRUE(fs::exists(root_ / "e/oracle.csv"));
  EXPECT_TRUE(json_file("e/manifest.json")["diagnostics"].contains("domain_truncation_mass"));
}

TEST_F(RunnerTest, MultiplicativeRunHasNoOracle) {
  run("estimate",
      config("m.json", R"({"model": {"sigma": {"kind": "sine"}, "phi": {"kind": "constant", "value": 1}}, "solver": {"points": 128, "horizon": 0.2,
           "paths": 20}, "estimator": {"k": [2], "space_lags": [4, 5, 6, 8, 11, 16], "space_window": [4, 16],
           "time_lags": [4, 6, 8, 11, 16], "time_window": [4, 16]}})"),
      "m");
  EXPECT_FALSE(fs::exists(root_ / "m/oracle.csv"));
  EXPECT_EQ(json_file("m/results.json")["checks"].size(), 2u);
}

TEST_F(RunnerTest, ReportMergesDedupsAndCarriesMargins) {
  const auto cfg = config("e.json", kSmallEstimate);
  run("estimate", cfg, "r1");
  run("estimate", cfg, "r2");
  ASSERT_EQ(run("report", std::nullopt, "rep", {(root_ / "r1").string(), (root_ / "r2").string()}), 0) << stderr_;
  const auto s = json_file("rep/summary.json");
  ASSERT_EQ(s["runs"].size(), 1u);
  EXPECT_TRUE(s["runs"][0].contains("margins"));
  EXPECT_EQ(s["checks_total"].get<std::size_t>(), 4u);
  const auto plot = file("rep/plot.csv");
  EXPECT_EQ(plot.substr(0, plot.find('\n')), "run,axis,k,lag,moment,stderr,log_lag,log_moment");
}

TEST_F(RunnerTest, ReportEdgeCases) {
  EXPECT_EQ(run("report", config("r.json", R"({"runs": []})"), "empty"), 0);
  EXPECT_EQ(json_file("empty/summary.json")["runs"].size(), 0u);
  EXPECT_EQ(run("report", std::nullopt, "missing", {(root_ / "nowhere").string()}), 2);
  EXPECT_NE(stderr_.find("manifest"), std::string::npos);
}

TEST_F(RunnerTest, NoiseRunChecksCovariance) {
  EXPECT_EQ(run("noise", config("n.json", R"({"noise": {"draws": 4000, "tolerance": 0.1}})"), "n"), 0) << stdout_;
  const auto csv = file("n/noise_covariance.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(run("noise", config("m.json", R"({"noise": {"beta": 1.0}})"), "m"), 2);
  EXPECT_NE(stderr_.find("noise.beta"), std::string::npos);
}

TEST_F(RunnerTest, VerifyWithDefaultGridsPasses) {
  ASSERT_EQ(run("verify", config("v.json", "{}"), "v"), 0) << stdout_;
  std::size_t passes = 0;
  for (std::size_t p = stdout_.find("PASS"); p != std::string::npos; p = stdout_.find("PASS", p + 1)) ++passes;
  EXPECT_GE(passes, 7u);
  EXPECT_EQ(file("v/summary.txt"), stdout_);
  EXPECT_EQ(json_file("v/checks.json").size(), 8u);
}

}  // namespace
