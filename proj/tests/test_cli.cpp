#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trustlab/data.hpp"
#include "trustlab/pipeline.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(TRUSTLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("trustlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& f) const { return (dir_ / f).string(); }
  fs::path dir_;
};

constexpr const char* kWorkedExample = "\"50,-100,-50,30;30,-50,-10,20\"";

TEST_F(Cli, AnalyzeReportsWeightsAndMeasures) {
  const CliRun r = run(std::string("analyze --game ") + kWorkedExample);
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["weights"]["rc_a"].get<double>(), -0.15, 1e-12);
  EXPECT_NEAR(j["weights"]["fc_a"].get<double>(), 0.35, 1e-12);
  EXPECT_NEAR(j["weights"]["bc_a"].get<double>(), 1.15, 1e-12);
  EXPECT_NEAR(j["ti"].get<double>(), 0.2857142857142857, 1e-15);
  EXPECT_EQ(j["regime"], "Coerced");
  EXPECT_EQ(j["spe"]["predicted_cell"], 11);
  EXPECT_EQ(j["conditions"]["temptation"], false);
  EXPECT_FALSE(j.contains("ti_transformed"));

  const CliRun s = run(std::string("analyze --cl-alt -0.8 --game ") + kWorkedExample);
  ASSERT_EQ(s.code, 0);
  const Json k = Json::parse(s.out);
  EXPECT_NEAR(k["ti_transformed"].get<double>(), 1.4285714285714286, 1e-12);
  EXPECT_EQ(k["regime_transformed"], "Invalid");
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("analyze --game 1,2,3").code, 1);
  EXPECT_EQ(run("analyze --game \"1,1,1,1;0,1,0,1\"").code, 1);  // constant trustor
  EXPECT_EQ(run("no-such-command").code, 1);
  EXPECT_EQ(run("generate --n 0").code, 1);
  EXPECT_EQ(run("eval --input " + path("missing.csv") + " --models ols").code, 1);
  // Collinear indicators without VIF pruning make the OLS design singular.
  ASSERT_EQ(run("generate --n 60 --require exposure,improvement --planted intercept=0,ti=1 "
                "--seed 2 --output " + path("g.csv")).code, 0);
  EXPECT_EQ(run("fit --model ols --vif 0 --input " + path("g.csv")).code, 2);
  EXPECT_EQ(run("fit --model bogus --input " + path("g.csv")).code, 1);
}

TEST_F(Cli, TransformNormalizes) {
  const CliRun r = run(std::string("transform --normalize --game ") + kWorkedExample);
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["payoffs"]["a"][1], -1.0);
  EXPECT_EQ(j["payoffs"]["b"][0], 0.6);
  EXPECT_EQ(j["payoffs"]["b"][1], -1.0);
}

TEST_F(Cli, GenerateClassifyFeatures) {
  ASSERT_EQ(run("generate --n 240 --require exposure,improvement,temptation,mutual_gain "
                "--scale-min 1 --scale-max 1000 --seed 5 --output " + path("g.csv")).code, 0);
  const trustlab::GameDataset ds = trustlab::parse_csv(path("g.csv"));
  ASSERT_EQ(ds.records.size(), 240u);

  const CliRun c = run("classify --verdict TrustorTrustGame --input " + path("g.csv"));
  ASSERT_EQ(c.code, 0);
  std::istringstream in(c.out);
  const trustlab::GameDataset kept = trustlab::parse_csv(in);
  EXPECT_EQ(kept.records.size(), 240u);

  const CliRun f = run("features --input " + path("g.csv"));
  ASSERT_EQ(f.code, 0);
  const std::string header = f.out.substr(0, f.out.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 15);  // 16 feature columns
  EXPECT_EQ(header.substr(0, 8), "ri,lev1,");
  EXPECT_EQ(std::count(f.out.begin(), f.out.end(), '\n'), 241);
}

TEST_F(Cli, FitMatchesLibrary) {
  ASSERT_EQ(run("generate --n 150 --require exposure,improvement "
                "--planted intercept=-0.5,ti=2,rc_b=1 --seed 8 --output " + path("g.csv")).code, 0);
  const CliRun r = run("fit --model ols --vif 5 --input " + path("g.csv"));
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);

  using namespace trustlab;
  const GameTable g = build_table(parse_csv(path("g.csv")));
  const modeling::FeatureTable t = prepare_features(g.table, 5.0);
  const modeling::LinearFit f = modeling::fit_ols(t);
  ASSERT_EQ(j["features"].size(), t.cols());
  for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
    EXPECT_EQ(j["model"]["coefficients"][i].get<double>(), f.coefficients[i]);
  }
}

TEST_F(Cli, EvalOneRowPerModel) {
  ASSERT_EQ(run("generate --n 120 --require exposure,improvement "
                "--planted intercept=0,ti=2 --seed 4 --output " + path("g.csv")).code, 0);
  const std::string models = "spe,ia,erc,cr,ols,logit,tree,lsboost,knn";
  const CliRun r = run("eval --vif 5 --kfold 5 --models " + models + " --input " + path("g.csv") +
                    " --output " + path("e.csv"));
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path("e.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "method,mse,roc_auc,mcc,kfold_loss");
  std::vector<std::string> names;
  while (std::getline(in, line)) names.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(names, (std::vector<std::string>{"spe", "ia", "erc", "cr", "ols", "logit", "tree",
                                              "lsboost", "knn"}));
  const CliRun rep = run("report --input " + path("e.csv"));
  ASSERT_EQ(rep.code, 0);
  EXPECT_NE(rep.out.find("lsboost"), std::string::npos);
}

TEST_F(Cli, DeterministicOutputs) {
  const std::string gen = "generate --n 80 --require exposure,improvement --planted "
                          "intercept=0,ti=1 --noise 0.1 --seed 21";
  const CliRun a = run(gen), b = run(gen);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run(gen + "1").out);
  std::ofstream(path("g.csv")) << a.out;
  const std::string ev = "eval --vif 5 --kfold 4 --models tree,knn,ols_step --json --input " +
                         path("g.csv");
  const CliRun e1 = run(ev), e2 = run(ev);
  ASSERT_EQ(e1.code, 0);
  EXPECT_EQ(e1.out, e2.out);
}

TEST_F(Cli, SplitEvaluation) {
  ASSERT_EQ(run("generate --n 100 --require exposure,improvement --planted intercept=0,ti=2 "
                "--seed 6 --output " + path("g.csv")).code, 0);
  ASSERT_EQ(run("classify --fraction 0.7 --seed 1 --input " + path("g.csv") + " --output " +
                path("s.csv")).code, 0);
  const CliRun r = run("eval --split --vif 5 --models mean,ols --input " + path("s.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "method,estimation_mse,estimation_loss,prediction_mse,prediction_loss,"
            "prediction_auc,prediction_mcc");
  EXPECT_EQ(run("eval --split --models ols --input " + path("g.csv")).code, 1);
}

}  // namespace
