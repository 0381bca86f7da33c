#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "trustlab/data.hpp"
#include "trustlab/pipeline.hpp"

using namespace trustlab;
using modeling::TargetKind;

namespace {

GameDataset planted(int n, std::uint64_t seed, bool trustee = false) {
  GeneratorSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.required = {Condition::kExposure, Condition::kImprovement};
  spec.response = PlantedResponse{-0.5, {{"ti", 2.0}, {"rc_b", 1.0}}};
  if (trustee) spec.trustee_noise = 0.1;
  return generate(spec);
}

GameTable prepared(const GameTable& g, double vif = 5.0) {
  return {prepare_features(g.table, vif), g.games, g.source};
}

TEST(BuildTable, ColumnsAndTargets) {
  const GameDataset ds = planted(60, 1);
  const GameTable auto_t = build_table(ds);
  ASSERT_EQ(auto_t.table.cols(), 17u);
  EXPECT_EQ(auto_t.table.names().back(), "ti");
  for (std::size_t c = 0; c < kFeatureColumns.size(); ++c) {
    EXPECT_EQ(auto_t.table.name(c), kFeatureColumns[c]);
  }
  EXPECT_EQ(auto_t.table.kind(), TargetKind::kProportion);
  EXPECT_EQ(auto_t.table.target()[3], *ds.records[3].pr_trust);

  const GameTable dec = build_table(ds, Role::kTrustor, ResponseChoice::kDecision);
  EXPECT_EQ(dec.table.kind(), TargetKind::kBinary);
  EXPECT_EQ(dec.table.target()[5], *ds.records[5].trust_decision);

  // Features agree with the per-game computation.
  const auto f = feature_values(seven_strategies(ds.records[7].payoffs));
  for (std::size_t c = 0; c < f.size(); ++c) EXPECT_EQ(auto_t.table.at(7, c), f[c]);
  EXPECT_EQ(auto_t.table.at(7, 16), trust_index(decompose(normalize(ds.records[7].payoffs))));
}

TEST(BuildTable, TrusteeTargetAndMissingRows) {
  GameDataset ds = planted(40, 2, true);
  ds.records[4].pr_fulfill.reset();
  const GameTable g = build_table(ds, Role::kTrustee);
  EXPECT_EQ(g.table.rows(), 39u);
  EXPECT_EQ(g.table.kind(), TargetKind::kBinary);
  EXPECT_EQ(g.source[4], 5u);
  EXPECT_EQ(g.games.size(), 39u);
  GameDataset none = planted(5, 3);
  EXPECT_THROW(build_table(none, Role::kTrustee), InputError);
}

TEST(BuildTable, TiOmittedWhenUndefined) {
  GameDataset ds = planted(10, 4);
  // a11 + a21 - a12 - a22 = 0: no trust index.
  ds.records[0].payoffs = PayoffMatrix(2, 1, 0, 1, 1, 0, 0, 0);
  const GameTable g = build_table(ds);
  EXPECT_EQ(g.table.cols(), 16u);
  EXPECT_FALSE(g.table.index_of("ti"));
}

TEST(PrepareFeatures, DropsConstantsThenCollinear) {
  GameDataset ds = planted(200, 5);
  const GameTable g = build_table(ds);
  PrepareLog log;
  const modeling::FeatureTable t = prepare_features(g.table, 5.0, &log);
  for (const std::string& c : log.constant_dropped) {
    const auto col = g.table.column(*g.table.index_of(c));
    EXPECT_EQ(*std::min_element(col.begin(), col.end()), *std::max_element(col.begin(), col.end()));
  }
  for (const auto& d : log.vif_dropped) EXPECT_GT(d.vif, 5.0);
  const auto v = modeling::vif(t);
  for (double x : v) EXPECT_LE(x, 5.0);
  EXPECT_EQ(t.cols() + log.constant_dropped.size() + log.vif_dropped.size(), g.table.cols());
  // Target-independent: the same columns survive under a permuted target.
  GameDataset shuffled = ds;
  std::reverse(shuffled.records.begin(), shuffled.records.end());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    shuffled.records[i].payoffs = ds.records[i].payoffs;
  }
  EXPECT_EQ(prepare_features(build_table(shuffled).table, 5.0).names(), t.names());
}

TEST(Evaluate, OneReportPerMethodAndDeterministic) {
  const GameTable g = build_table(planted(120, 6), Role::kTrustor, ResponseChoice::kDecision);
  const GameTable p = prepared(g);
  const std::vector<std::string> methods = method_names();
  const auto reps = evaluate(p, methods, 5, 3);
  ASSERT_EQ(reps.size(), methods.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    EXPECT_EQ(reps[i].method, methods[i]);
    EXPECT_EQ(reps[i].folds.size(), 5u);
    EXPECT_TRUE(std::isfinite(reps[i].mse));
    EXPECT_GE(reps[i].kfold_loss, 0);
    EXPECT_LE(reps[i].kfold_loss, 1);
  }
  EXPECT_EQ(to_csv(reps), to_csv(evaluate(p, methods, 5, 3)));
  EXPECT_THROW(evaluate(p, {"bogus"}, 5, 3), InputError);
}

TEST(Evaluate, SpeBaselineMatchesIndicator) {
  const GameTable g = build_table(planted(50, 7));
  const auto s = fit_predict("spe", g, {}, {0, 1, 2, 3, 4}, {});
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i], spe(g.games[i]).trustor_choice == TrustorChoice::kTrust ? 1.0 : 0.0);
  }
}

TEST(Evaluate, PlantedModelBeatsMean) {
  const GameTable g = prepared(build_table(planted(400, 8)));
  const auto reps = evaluate(g, {"mean", "logit"}, 10, 1);
  EXPECT_LT(reps[1].mse, 0.2 * reps[0].mse);
}

TEST(EvaluateSplit, UsesSplitLabels) {
  const GameDataset ds = split(planted(150, 9), 0.6, 4);
  const GameTable g = prepared(build_table(ds, Role::kTrustor, ResponseChoice::kDecision));
  const auto reps = evaluate_split(ds, g, {"mean", "ols"});
  ASSERT_EQ(reps.size(), 2u);
  // The mean model predicts the estimation-split mean everywhere.
  double mean = 0;
  int n = 0;
  std::vector<double> yp;
  for (std::size_t i = 0; i < g.source.size(); ++i) {
    if (*ds.records[g.source[i]].split == Split::kEstimation) {
      mean += g.table.target()[i];
      ++n;
    } else {
      yp.push_back(g.table.target()[i]);
    }
  }
  mean /= n;
  double m = 0;
  for (double y : yp) m += (y - mean) * (y - mean);
  EXPECT_NEAR(reps[0].prediction_mse, m / yp.size(), 1e-12);
  EXPECT_EQ(*reps[0].prediction_auc, 0.5);  // constant scores: all ties
  EXPECT_THROW(evaluate_split(planted(20, 1), build_table(planted(20, 1)), {"mean"}), InputError);
}

TEST(Serialization, CsvAndJsonShapes) {
  modeling::EvalReport r;
  r.method = "ols";
  r.mse = 0.25;
  r.kfold_loss = 0.1;
  r.mcc = 0.5;
  r.folds = {{0, 3, 0.2, 0.0}};
  const std::string csv = to_csv(std::vector<modeling::EvalReport>{r});
  EXPECT_EQ(csv, "method,mse,roc_auc,mcc,kfold_loss\nols,0.25,,0.5,0.1\n");
  const auto j = to_json(std::vector<modeling::EvalReport>{r});
  EXPECT_TRUE(j[0]["roc_auc"].is_null());
  EXPECT_EQ(j[0]["folds"][0]["size"], 3);
  const std::string t = render_table({"method", "mse"}, {{"ols", "0.25"}, {"knn", "1"}});
  EXPECT_NE(t.find("ols     0.25\n"), std::string::npos);
  EXPECT_EQ(t.find(" \n"), std::string::npos);
}

}  // namespace
