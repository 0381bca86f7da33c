#pragma once

// k-fold cross-validation and the evaluation report.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "trustlab/error.hpp"
#include "trustlab/modeling/metrics.hpp"
#include "trustlab/modeling/model.hpp"
#include "trustlab/modeling/table.hpp"
#include "trustlab/random.hpp"

namespace trustlab::modeling {

// Fold id per row. Stratified folds shuffle each class separately and deal
// the concatenated classes round-robin, so both the overall fold sizes and
// the per-class counts differ by at most one.
inline std::vector<int> make_folds(const std::vector<double>& target, int k,
                                   std::uint64_t seed, bool stratify) {
  const std::size_t n = target.size();
  if (k < 2) throw InputError("k-fold needs k >= 2");
  if (n < static_cast<std::size_t>(k)) {
    throw InputError("k-fold needs at least k rows");
  }
  Rng rng(seed);
  std::vector<std::size_t> order;
  if (stratify) {
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < n; ++i) (to_label(target[i]) ? pos : neg).push_back(i);
    rng.shuffle(neg);
    rng.shuffle(pos);
    order = neg;
    order.insert(order.end(), pos.begin(), pos.end());
  } else {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
  }
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % k);
  return fold;
}

struct FoldResult {
  int fold = 0;
  std::size_t size = 0;
  double mse = 0.0;
  double misclassification = 0.0;
};

struct EvalReport {
  std::string method;
  // Pooled over out-of-fold predictions.
  double mse = 0.0;
  std::optional<double> roc_auc;
  std::optional<double> mcc;
  // Mean over folds of the misclassification rate.
  double kfold_loss = 0.0;
  std::vector<FoldResult> folds;
  std::vector<double> predictions;  // out-of-fold scores, by row
};

using FitPredict = std::function<std::vector<double>(
    const std::vector<std::size_t>& train, const std::vector<std::size_t>& test)>;

// Runs fit_predict once per fold; results are merged by fold index.
inline EvalReport cross_validate(const std::vector<double>& target, int k,
                                 std::uint64_t seed, bool stratify,
                                 const FitPredict& fit_predict) {
  const std::vector<int> fold = make_folds(target, k, seed, stratify);
  EvalReport rep;
  rep.predictions.assign(target.size(), 0.0);
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < target.size(); ++i) {
      (fold[i] == f ? test : train).push_back(i);
    }
    const std::vector<double> pred = fit_predict(train, test);
    if (pred.size() != test.size()) {
      throw InputError("cross-validation: prediction count mismatch");
    }
    std::vector<double> t;
    for (std::size_t i = 0; i < test.size(); ++i) {
      rep.predictions[test[i]] = pred[i];
      t.push_back(target[test[i]]);
    }
    rep.folds.push_back({f, test.size(), mse(pred, t), misclassification(pred, t)});
  }
  rep.mse = mse(rep.predictions, target);
  rep.roc_auc = roc_auc(rep.predictions, target);
  rep.mcc = mcc(rep.predictions, target);
  double loss = 0.0;
  for (const FoldResult& r : rep.folds) loss += r.misclassification;
  rep.kfold_loss = loss / static_cast<double>(rep.folds.size());
  return rep;
}

inline EvalReport kfold(const FeatureTable& t, ModelKind kind,
                        const ModelParams& p = {}, int k = 10,
                        std::uint64_t seed = 0) {
  EvalReport rep = cross_validate(
      t.target(), k, seed, is_classification(t.kind()),
      [&](const std::vector<std::size_t>& train,
          const std::vector<std::size_t>& test) {
        const FittedModel m = fit_model(t.select_rows(train), kind, p);
        return m.score(t.select_rows(test));
      });
  rep.method = std::string(to_string(kind));
  return rep;
}

}  // namespace trustlab::modeling
