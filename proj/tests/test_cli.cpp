#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bergman/cli.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = BERGMAN_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    out_ = fs::temp_directory_path() /
           ("bergman_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(out_);
  }
  void TearDown() override { fs::remove_all(out_); }

  int run(const std::string& text, unsigned workers = 1, const fs::path& sub = "") {
    cli::RunOptions opt;
    opt.workers = workers;
    opt.reproducible = true;
    err_.str("");
    return cli::run(text, kConfigs, out_ / sub, opt, err_);
  }
  int run_file(const std::string& name, unsigned workers = 1, const fs::path& sub = "") {
    return run(slurp(kConfigs / name), workers, sub);
  }
  nlohmann::json report(const fs::path& sub = "") { return nlohmann::json::parse(slurp(out_ / sub / "report.json")); }

  fs::path out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, NormUnitDisk) {
  ASSERT_EQ(run_file("norm_unit_disk.json"), 0) << err_.str();
  EXPECT_NEAR(report()["result"]["value"].get<double>(), std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_FALSE(report().contains("generated_at"));
  EXPECT_EQ(slurp(out_ / "rows.csv").substr(0, 20), "piece,contribution\r\n");
  EXPECT_NE(err_.str().find("norm: value="), std::string::npos);
}

TEST_F(CliTest, NormBesovBall) {
  ASSERT_EQ(run_file("norm_besov_ball.json"), 0) << err_.str();
  EXPECT_NEAR(report()["result"]["value_pow_p"].get<double>(), 8.0 / 15.0, 1e-8);
}

TEST_F(CliTest, CheckConditionGaussian) {
  ASSERT_EQ(run_file("check_condition_gaussian.json"), 0) << err_.str();
  const auto r = report()["result"];
  EXPECT_TRUE(r["passed"].get<bool>());
  EXPECT_LE(r["C_estimate"].get<double>(), 1 + 1e-9);
  EXPECT_EQ(r["status"], "certified on grid");
}

TEST_F(CliTest, FindK) {
  ASSERT_EQ(run_file("find_k_standard_alpha.json"), 0) << err_.str();
  EXPECT_LE(report()["result"]["k_min"].get<unsigned>(), 3u);
  EXPECT_EQ(slurp(out_ / "rows.csv").rfind("k,sup_ratio,tail_C,passed\r\n", 0), 0u);
}

TEST_F(CliTest, CheckMonotone) {
  ASSERT_EQ(run_file("check_monotone_exp_modulus.json"), 0) << err_.str();
  EXPECT_FALSE(report()["result"]["all_monotone"].get<bool>());
  EXPECT_LT(report()["result"]["worst_slope"].get<double>(), -1e-6);
}

TEST_F(CliTest, DilateConverge) {
  ASSERT_EQ(run_file("dilate_converge_gaussian.json", 4), 0) << err_.str();
  const auto rows = report()["result"]["rows"];
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i]["norm_diff"], rows[i - 1]["norm_diff"]);
  EXPECT_TRUE(report()["result"]["vanishing_check"].get<bool>());
  EXPECT_EQ(slurp(out_ / "rows.csv").rfind("r,norm_fr,norm_diff\r\n", 0), 0u);
  const std::string svg = slurp(out_ / "plot.svg");
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 4u);
}

TEST_F(CliTest, TaylorError) {
  ASSERT_EQ(run_file("taylor_error_angular.json"), 0) << err_.str();
  const auto r = report()["result"];
  EXPECT_TRUE(r["nonincreasing"].get<bool>());
  EXPECT_EQ(r["rows"].back()["error"].get<double>(), 0.0);
}

TEST_F(CliTest, Density) {
  ASSERT_EQ(run_file("density_angular.json"), 0) << err_.str();
  const auto r = report()["result"];
  EXPECT_NEAR(r["rows"].back()["error"].get<double>(), r["dilation_error"].get<double>(), 1e-8);
  EXPECT_EQ(slurp(out_ / "rows.csv").rfind("degree,error\r\n", 0), 0u);
}

TEST_F(CliTest, EveryFixtureRuns) {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".json" || name.rfind("series_", 0) == 0) continue;
    const int expect = name.rfind("invalid_", 0) == 0 ? 2 : 0;
    EXPECT_EQ(run_file(name, 2, entry.path().stem()), expect) << name << ": " << err_.str();
  }
}

TEST_F(CliTest, MalformedExpressionIsValidationError) {
  ASSERT_EQ(run_file("invalid_weight_expression.json"), 2);
  EXPECT_NE(err_.str().find("byte offset 12"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(out_ / "report.json"));
}

TEST_F(CliTest, ValidationErrors) {
  EXPECT_EQ(run("{not json"), 2);
  EXPECT_EQ(run(R"({"command": "frobnicate", "weight": "exp_modulus"})"), 2);
  EXPECT_EQ(run(R"({"command": "norm", "weight": "expr:1"})"), 2);
  EXPECT_EQ(run(R"({"command": "norm", "weight": "expr:1", "norm": {"kind": "besov_ball", "p": 1, "N": 1},
                    "dimension": 2, "series": {"dim": 2, "terms": []}})"),
            2);
  EXPECT_NE(err_.str().find("p*N > n"), std::string::npos);
  EXPECT_EQ(run(R"({"command": "norm", "weight": "expr:1", "norm": {"kind": "bergman_polydisk"},
                    "series": {"dim": 1, "terms": [{"m": [1], "re": 1}, {"m": [1], "re": 2}]}})"),
            2);
  EXPECT_EQ(run(R"({"command": "dilate-converge", "weight": "expr:1", "norm": {"kind": "bergman_polydisk"},
                    "series": {"dim": 1, "terms": []}, "radii": [0.9, 0.5]})"),
            2);
  EXPECT_EQ(run(R"({"command": "find-k", "weight": "gaussian", "k_max": 65})"), 2);
  EXPECT_EQ(run(R"({"command": "norm", "weight": "expr:1", "norm": {"kind": "bergman_polydisk"},
                    "series_file": "missing.json"})"),
            2);
  EXPECT_FALSE(fs::exists(out_ / "report.json"));
}

TEST_F(CliTest, NumericalErrorExitsThree) {
  EXPECT_EQ(run(R"({"command": "norm", "weight": "expr:x1", "norm": {"kind": "bergman_polydisk"},
                    "series": {"dim": 1, "terms": [{"m": [0], "re": 1}]}})"),
            3);
  EXPECT_NE(err_.str().find("numerical error"), std::string::npos);
  EXPECT_FALSE(fs::exists(out_ / "report.json"));
  EXPECT_FALSE(fs::exists(out_ / "report.json.tmp"));
}

TEST_F(CliTest, ReproducibleAcrossWorkers) {
  for (const char* name : {"check_condition_gaussian.json", "taylor_error_angular.json", "norm_besov_ball.json"}) {
    ASSERT_EQ(run_file(name, 1, "a"), 0);
    ASSERT_EQ(run_file(name, 8, "b"), 0);
    EXPECT_EQ(slurp(out_ / "a" / "report.json"), slurp(out_ / "b" / "report.json")) << name;
  }
}

TEST_F(CliTest, TimestampOnlyWithoutReproducibleFlag) {
  cli::RunOptions opt;
  opt.workers = 3;
  ASSERT_EQ(cli::run(slurp(kConfigs / "norm_unit_disk.json"), kConfigs, out_, opt, err_), 0);
  EXPECT_TRUE(report().contains("generated_at"));
  EXPECT_EQ(report()["workers"], 3);
}

TEST(Report, CsvQuoting) {
  report::Csv csv({"a", "b"});
  csv.row({"x,y", "say \"hi\""});
  EXPECT_EQ(csv.str(), "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n");
  EXPECT_EQ(report::number(0.1), "0.1");
  EXPECT_EQ(report::number(1e-300), "1e-300");
}

TEST(Report, EmptyPlot) {
  const std::string svg = report::plot(DensityReport{});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
}

TEST(Report, EmitPlotWritesFile) {
  const fs::path p = fs::temp_directory_path() / "bergman_emit_plot.svg";
  ConvergenceReport r;
  r.rows = {{0.9, 1, 0.1}, {0.99, 1, 0.01}, {0.999, 1, 0.0}};
  cli::emit_plot(r, p);
  const std::string svg = slurp(p);
  std::size_t circles = 0;
  for (std::size_t q = svg.find("<circle"); q != std::string::npos; q = svg.find("<circle", q + 1)) ++circles;
  EXPECT_EQ(circles, 3u);
  fs::remove(p);
}
