#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_support.hpp"
#include "ucompare/dataset.hpp"
#include "ucompare/estimators.hpp"
#include "ucompare/kernels.hpp"
#include "ucompare/learners.hpp"
#include "ucompare/random.hpp"
#include "ucompare_cli/cli.hpp"

using namespace ucompare;
using Json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string strip_wall_time(const std::string& report) {
  static const std::regex wall("\"wall_time_seconds\": [^\\n,}]*");
  return std::regex_replace(report, wall, "\"wall_time_seconds\": 0");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("ucompare_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
    unsetenv("UCOMPARE_THREADS");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write_data(std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    const Dataset d = fixtures::random_dataset(n, 2, rng, false);
    const auto path = dir_ / ("data_" + std::to_string(n) + "_" + std::to_string(seed) + ".csv");
    save_csv(path, d);
    return path.string();
  }

  std::string write_text(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, IdenticalLearnersAreDegenerate) {
  const auto data = write_data(20, 1);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:3", "--learner-b", "knn:3",
                         "--g", "4", "--iterations", "200"});
  EXPECT_EQ(r.code, cli::kExitDegenerate);
  const Json report = Json::parse(r.out);
  EXPECT_EQ(report["outputs"]["delta_hat"].get<double>(), 0.0);
  EXPECT_TRUE(report["outputs"]["degenerate"].get<bool>());
  EXPECT_TRUE(report["outputs"]["decision"].is_null());
  EXPECT_TRUE(report["outputs"]["nondegeneracy_warning"].is_string());
}

TEST_F(CliTest, ReportStructureAndSelfConsistency) {
  const auto data = write_data(30, 2);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "centroid",
                         "--g", "5", "--iterations", "3000", "--seed", "17"});
  ASSERT_TRUE(r.code == cli::kExitOk || r.code == cli::kExitDegenerate) << r.err;
  const Json report = Json::parse(r.out);
  EXPECT_EQ(report["schema"], 1);
  const auto& in = report["inputs"];
  EXPECT_EQ(in["learner_a"], "knn:1");
  EXPECT_EQ(in["learner_b"], "centroid");
  EXPECT_EQ(in["g"], 5);
  EXPECT_EQ(in["n"], 30);
  EXPECT_EQ(in["seed"], 17);
  EXPECT_EQ(in["budgets"]["kappa"], 3000);
  EXPECT_EQ(in["variance_mode"], "unbiased");
  EXPECT_EQ(in["alpha"], 0.05);
  const auto& out = report["outputs"];
  const auto kappas = out["kappa_hats"].get<std::vector<double>>();
  const auto alpha = out["alpha_weights"].get<std::vector<double>>();
  ASSERT_EQ(kappas.size(), 6u);
  ASSERT_EQ(alpha.size(), 7u);
  const double theta2 = out["theta2_hat"].get<double>();
  double v = 0.0;
  for (std::size_t c = 1; c <= 6; ++c) v += alpha[c] * kappas[c - 1];
  v -= (1.0 - alpha[0]) * theta2;
  EXPECT_NEAR(out["v_hat"].get<double>(), v, 1e-12);
  const auto zetas = out["zeta_hats"].get<std::vector<double>>();
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(zetas[c], kappas[c] - theta2);
  EXPECT_EQ(report["provenance"]["rng_algorithm"], std::string(kRngAlgorithm));
  EXPECT_TRUE(report["provenance"]["wall_time_seconds"].is_number());
}

TEST_F(CliTest, DoublesRoundTripThroughTheReport) {
  const auto data = write_data(14, 3);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "stump",
                         "--g", "3", "--complete"});
  const Json report = Json::parse(r.out);
  const auto csv = load_csv(data);
  EstimatorConfig config;
  config.g = 3;
  config.mode = EstimationMode::complete;
  const ComparisonKernel kernel(knn_learner(1), decision_stump_learner(), Loss::misclassification(), 3);
  const ComparisonEstimate e = estimate_comparison(kernel, csv, config, true);
  EXPECT_EQ(report["outputs"]["delta_hat"].get<double>(), e.delta_hat);
  EXPECT_EQ(report["outputs"]["v_hat"].get<double>(), e.variance->v_hat);
  EXPECT_EQ(report["outputs"]["kappa_hats"].get<std::vector<double>>(), e.variance->kappa_hats);
  EXPECT_EQ(report["inputs"]["mode"], "complete");
}

TEST_F(CliTest, ByteIdenticalAcrossRunsAndThreadCounts) {
  const auto data = write_data(40, 4);
  std::vector<std::string> args = {"compare", "--data", data, "--learner-a", "knn:3", "--learner-b",
                                   "stump", "--g", "8", "--iterations", "2500", "--seed", "99"};
  auto with_threads = [&](const std::string& t) {
    auto a = args;
    a.insert(a.end(), {"--threads", t});
    return strip_wall_time(run_cli(a).out);
  };
  const std::string one = with_threads("1");
  EXPECT_EQ(one, with_threads("1"));
  EXPECT_EQ(one, with_threads("4"));
  EXPECT_EQ(one, with_threads("3"));
  EXPECT_NE(one.find("\"seed\": 99"), std::string::npos);
}

TEST_F(CliTest, SampleBelowTwoGPlusTwoExitsTwo) {
  const auto data = write_data(10, 5);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "const:0",
                         "--g", "5"});
  EXPECT_EQ(r.code, cli::kExitInsufficientSample);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("n >= 2g + 2"), std::string::npos);
  const CliRun point_only = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b",
                                  "const:0", "--g", "5", "--no-variance", "--iterations", "50"});
  EXPECT_EQ(point_only.code, cli::kExitOk) << point_only.err;
  EXPECT_FALSE(Json::parse(point_only.out)["outputs"].contains("v_hat"));
}

TEST_F(CliTest, PaperSizedLearningSetBoundary) {
  const auto data = write_data(62, 6);
  const std::vector<std::string> base = {"compare", "--data", data, "--learner-a", "const:1",
                                         "--learner-b", "centroid", "--iterations", "20"};
  auto with_g = [&](const std::string& g) {
    auto a = base;
    a.insert(a.end(), {"--g", g});
    return run_cli(a);
  };
  const CliRun ok = with_g("30");
  EXPECT_TRUE(ok.code == cli::kExitOk || ok.code == cli::kExitDegenerate) << ok.err;
  EXPECT_EQ(with_g("31").code, cli::kExitInsufficientSample);
}

TEST_F(CliTest, DigitsSetEveryBudget) {
  const auto data = write_data(62, 7);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "const:1", "--learner-b", "const:0",
                         "--g", "26", "--digits", "2", "--no-variance"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Json report = Json::parse(r.out);
  EXPECT_EQ(report["inputs"]["digits"], 2);
  for (const char* key : {"delta", "kappa", "theta2"}) {
    EXPECT_EQ(report["inputs"]["budgets"][key].get<std::uint64_t>(), 100000u) << key;
  }
}

TEST_F(CliTest, DigitsOverrideIterationsWithAWarning) {
  const auto data = write_data(12, 8);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "const:0",
                         "--g", "2", "--digits", "1", "--iterations", "7"});
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(Json::parse(r.out)["inputs"]["budgets"]["delta"], 1000);
}

TEST_F(CliTest, DefaultSeedIsZeroAndRandomSeedIsRecorded) {
  const auto data = write_data(12, 9);
  const std::vector<std::string> base = {"compare", "--data", data, "--learner-a", "knn:1",
                                         "--learner-b", "const:0", "--g", "2", "--iterations", "100"};
  EXPECT_EQ(Json::parse(run_cli(base).out)["inputs"]["seed"], 0);
  auto random = base;
  random.insert(random.end(), {"--seed", "random"});
  EXPECT_TRUE(Json::parse(run_cli(random).out)["inputs"]["seed"].is_number_unsigned());
  auto bad = base;
  bad.insert(bad.end(), {"--seed", "-3"});
  EXPECT_EQ(run_cli(bad).code, cli::kExitError);
}

TEST_F(CliTest, ThreadEnvironmentVariableIsRecorded) {
  const auto data = write_data(12, 10);
  setenv("UCOMPARE_THREADS", "2", 1);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "const:0",
                         "--g", "2", "--iterations", "100"});
  unsetenv("UCOMPARE_THREADS");
  EXPECT_EQ(Json::parse(r.out)["provenance"]["threads_env"], "2");
}

TEST_F(CliTest, PluginModeAndLevel) {
  const auto data = write_data(20, 11);
  const CliRun r = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "const:0",
                         "--g", "2", "--complete", "--variance-mode", "plugin", "--alpha", "0.1"});
  const Json report = Json::parse(r.out);
  EXPECT_EQ(report["inputs"]["variance_mode"], "plugin");
  EXPECT_EQ(report["inputs"]["alpha"], 0.1);
  if (!report["outputs"]["degenerate"].get<bool>()) {
    const auto kappas = report["outputs"]["kappa_hats"].get<std::vector<double>>();
    const double theta2 = report["outputs"]["theta2_hat"].get<double>();
    EXPECT_NEAR(report["outputs"]["u_n"].get<double>(), 9.0 * (kappas[0] - theta2) / 20.0, 1e-15);
  }
  EXPECT_EQ(run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b", "const:0",
                     "--g", "2", "--variance-mode", "exact"})
                .code,
            cli::kExitError);
}

TEST_F(CliTest, LabelColumnAndHeaderFlags) {
  const auto path = write_text("labels_first.csv", "1,0.5\n0,1.5\n1,0.25\n0,2\n1,0.1\n0,3\n");
  const CliRun r = run_cli({"compare", "--data", path, "--learner-a", "knn:1", "--learner-b", "const:0",
                         "--g", "2", "--complete", "--no-header", "--label-col", "0"});
  EXPECT_NE(r.code, cli::kExitError) << r.err;
  EXPECT_EQ(Json::parse(r.out)["inputs"]["n"], 6);
}

TEST_F(CliTest, IngestionAndFlagErrorsExitOne) {
  const auto bad_label = write_text("bad.csv", "x,y\n0,0\n1,2\n");
  CliRun r = run_cli({"compare", "--data", bad_label, "--learner-a", "knn:1", "--learner-b", "const:0",
                   "--g", "1"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("row 3"), std::string::npos);
  r = run_cli({"compare", "--data", (dir_ / "missing.csv").string(), "--learner-a", "knn:1",
               "--learner-b", "const:0", "--g", "1"});
  EXPECT_EQ(r.code, cli::kExitError);
  const auto data = write_data(10, 12);
  r = run_cli({"compare", "--data", data, "--learner-a", "lasso", "--learner-b", "const:0", "--g", "1"});
  EXPECT_EQ(r.code, cli::kExitError);
  r = run_cli({"compare", "--data", data, "--learner-a", "knn:1"});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_EQ(run_cli({}).code, cli::kExitError);
}

TEST_F(CliTest, OracleCheck) {
  const CliRun list = run_cli({"oracle-check", "--list"});
  EXPECT_EQ(list.code, cli::kExitOk);
  EXPECT_EQ(list.out.find("PASS"), std::string::npos);
  EXPECT_NE(list.out.find("three-atom/knn1-vs-const0/g1/n4"), std::string::npos);

  const CliRun all = run_cli({"oracle-check"});
  EXPECT_EQ(all.code, cli::kExitOk) << all.out;
  EXPECT_EQ(all.out.find("FAIL"), std::string::npos);

  const CliRun biased = run_cli({"oracle-check", "--inject-biased-theta2"});
  EXPECT_NE(biased.code, cli::kExitOk);
  EXPECT_NE(biased.out.find("FAIL three-atom/knn1-vs-const0/g1/n4 v-hat-unbiased"), std::string::npos);
}

TEST_F(CliTest, OracleResidualsAreTiny) {
  for (const auto& r : cli::run_oracle_checks({})) {
    EXPECT_LT(r.residual, 1e-10) << r.scenario << " " << r.invariant;
  }
}

TEST_F(CliTest, WeightsAndDesignSubcommands) {
  const CliRun w = run_cli({"weights", "--n", "4", "--m", "2"});
  EXPECT_EQ(w.code, cli::kExitOk);
  const Json weights = Json::parse(w.out);
  EXPECT_NEAR(weights["alpha"][1].get<double>(), 4.0 / 6.0, 1e-16);
  const CliRun d = run_cli({"design", "--kind", "kfold", "--n", "4", "--g", "2"});
  EXPECT_EQ(d.out, "3,4;1\n3,4;2\n1,2;3\n1,2;4\n");
  EXPECT_EQ(run_cli({"design", "--kind", "kfold", "--n", "5", "--g", "2"}).code, cli::kExitError);
}

#ifdef UCOMPARE_EXE
TEST_F(CliTest, ExecutableMatchesInProcessRun) {
  const auto data = write_data(25, 13);
  const auto out_path = dir_ / "report.json";
  const std::string command = std::string(UCOMPARE_EXE) + " compare --data " + data +
                              " --learner-a knn:1 --learner-b stump --g 4 --iterations 500 --seed 5" +
                              " --threads 2 > " + out_path.string() + " 2> /dev/null";
  const int status = std::system(command.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  std::ifstream in(out_path);
  const std::string from_exe((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const CliRun in_process = run_cli({"compare", "--data", data, "--learner-a", "knn:1", "--learner-b",
                                  "stump", "--g", "4", "--iterations", "500", "--seed", "5",
                                  "--threads", "1"});
  EXPECT_EQ(WEXITSTATUS(status), in_process.code);
  EXPECT_EQ(strip_wall_time(from_exe), strip_wall_time(in_process.out));
}
#endif
