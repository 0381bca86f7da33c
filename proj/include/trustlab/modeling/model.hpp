#pragma once

// A fitted model of any supported kind behind one prediction interface,
// with JSON persistence.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "trustlab/error.hpp"
#include "trustlab/modeling/ensemble.hpp"
#include "trustlab/modeling/linear.hpp"
#include "trustlab/modeling/metrics.hpp"
#include "trustlab/modeling/table.hpp"
#include "trustlab/modeling/tree.hpp"

namespace trustlab::modeling {

enum class ModelKind { kMean, kOls, kLogit, kTree, kLsBoost, kKnnEnsemble };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kMean:
      return "mean";
    case ModelKind::kOls:
      return "ols";
    case ModelKind::kLogit:
      return "logit";
    case ModelKind::kTree:
      return "tree";
    case ModelKind::kLsBoost:
      return "lsboost";
    case ModelKind::kKnnEnsemble:
      return "knn_ensemble";
  }
  return "mean";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "mean") return ModelKind::kMean;
  if (s == "ols") return ModelKind::kOls;
  if (s == "logit") return ModelKind::kLogit;
  if (s == "tree") return ModelKind::kTree;
  if (s == "lsboost") return ModelKind::kLsBoost;
  if (s == "knn" || s == "knn_ensemble") return ModelKind::kKnnEnsemble;
  return std::nullopt;
}

struct ModelParams {
  TreeParams tree;
  BoostParams boost;
  KnnParams knn;
  LogitOptions logit;
  std::uint64_t seed = 0;
};

struct MeanModel {
  double value = 0.0;
};

class FittedModel {
 public:
  using Impl =
      std::variant<MeanModel, LinearFit, DecisionTree, BoostedTrees, KnnEnsemble>;

  FittedModel(ModelKind kind, std::vector<std::string> features,
              TargetKind target, std::uint64_t seed, Impl impl)
      : kind_(kind),
        features_(std::move(features)),
        target_(target),
        seed_(seed),
        impl_(std::move(impl)) {}

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& features() const { return features_; }
  TargetKind target_kind() const { return target_; }
  std::uint64_t seed() const { return seed_; }
  const Impl& impl() const { return impl_; }

  // Regression value or positive-class probability, for a row ordered as
  // features().
  double score(std::span<const double> x) const {
    return std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, MeanModel>) {
            return m.value;
          } else if constexpr (std::is_same_v<M, DecisionTree> ||
                               std::is_same_v<M, KnnEnsemble>) {
            return m.score(x);
          } else {
            return m.predict(x);
          }
        },
        impl_);
  }

  // Class label for classification targets, score otherwise.
  double predict(std::span<const double> x) const {
    const double s = score(x);
    return is_classification(target_) ? static_cast<double>(to_label(s)) : s;
  }

  // Scores for every row of a table, matching columns by name.
  std::vector<double> score(const FeatureTable& t) const {
    std::vector<std::size_t> idx;
    for (const std::string& f : features_) {
      auto i = t.index_of(f);
      if (!i) throw InputError("model input lacks feature '" + f + "'");
      idx.push_back(*i);
    }
    std::vector<double> out(t.rows());
    std::vector<double> row(idx.size());
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t j = 0; j < idx.size(); ++j) row[j] = t.at(r, idx[j]);
      out[r] = score(row);
    }
    return out;
  }

 private:
  ModelKind kind_;
  std::vector<std::string> features_;
  TargetKind target_;
  std::uint64_t seed_;
  Impl impl_;
};

inline FittedModel fit_model(const FeatureTable& t, ModelKind kind,
                             const ModelParams& p = {}) {
  if (t.rows() == 0) throw InputError("cannot fit a model on an empty table");
  switch (kind) {
    case ModelKind::kMean: {
      double s = 0.0;
      for (double y : t.target()) s += y;
      return {kind, t.names(), t.kind(), p.seed,
              MeanModel{s / static_cast<double>(t.rows())}};
    }
    case ModelKind::kOls:
      return {kind, t.names(), t.kind(), p.seed, fit_ols(t)};
    case ModelKind::kLogit:
      if (t.kind() == TargetKind::kContinuous) {
        throw InputError("logit needs a binary or proportion target");
      }
      return {kind, t.names(), t.kind(), p.seed, fit_logit(t, p.logit)};
    case ModelKind::kTree: {
      TreeParams tp = p.tree;
      tp.seed = p.seed;
      return {kind, t.names(), t.kind(), p.seed, fit_tree(t, tp)};
    }
    case ModelKind::kLsBoost:
      return {kind, t.names(), t.kind(), p.seed, fit_lsboost(t, p.boost)};
    case ModelKind::kKnnEnsemble: {
      KnnParams kp = p.knn;
      kp.seed = p.seed;
      return {kind, t.names(), t.kind(), p.seed, fit_knn_ensemble(t, kp)};
    }
  }
  throw InputError("unknown model kind");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using Json = nlohmann::ordered_json;

// Non-finite doubles serialize as null; read them back as NaN.
inline std::vector<double> doubles(const Json& j) {
  std::vector<double> out;
  for (const Json& v : j) {
    out.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                              : v.get<double>());
  }
  return out;
}

inline Json tree_to_json(const DecisionTree& t) {
  Json nodes = Json::array();
  for (const TreeNode& n : t.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"positive_fraction", n.positive_fraction},
                     {"count", n.count},
                     {"risk", n.risk},
                     {"impurity_decrease", n.impurity_decrease}});
  }
  return {{"classification", t.classification()},
          {"features", t.names()},
          {"nodes", nodes}};
}

inline DecisionTree tree_from_json(const Json& j) {
  std::vector<TreeNode> nodes;
  for (const Json& n : j.at("nodes")) {
    TreeNode t;
    t.feature = n.at("feature").get<int>();
    t.threshold = n.at("threshold").get<double>();
    t.left = n.at("left").get<int>();
    t.right = n.at("right").get<int>();
    t.value = n.at("value").get<double>();
    t.positive_fraction = n.at("positive_fraction").get<double>();
    t.count = n.at("count").get<int>();
    t.risk = n.at("risk").get<double>();
    t.impurity_decrease = n.at("impurity_decrease").get<double>();
    nodes.push_back(t);
  }
  return DecisionTree(j.at("classification").get<bool>(),
                      j.at("features").get<std::vector<std::string>>(),
                      std::move(nodes));
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const FittedModel& m) {
  using detail::Json;
  Json j;
  j["kind"] = to_string(m.kind());
  j["target_kind"] = to_string(m.target_kind());
  j["seed"] = m.seed();
  j["features"] = m.features();
  std::visit(
      [&](const auto& impl) {
        using M = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<M, MeanModel>) {
          j["value"] = impl.value;
        } else if constexpr (std::is_same_v<M, LinearFit>) {
          j["names"] = impl.names;
          j["coefficients"] = impl.coefficients;
          j["std_errors"] = impl.std_errors;
          j["statistics"] = impl.statistics;
          j["p_values"] = impl.p_values;
          j["n"] = impl.n;
          j["rss"] = impl.rss;
          j["r_squared"] = impl.r_squared;
          j["deviance"] = impl.deviance;
          j["iterations"] = impl.iterations;
          j["converged"] = impl.converged;
          j["separation_warning"] = impl.separation_warning;
        } else if constexpr (std::is_same_v<M, DecisionTree>) {
          j["tree"] = detail::tree_to_json(impl);
          j["importances"] = impl.importances();
        } else if constexpr (std::is_same_v<M, BoostedTrees>) {
          j["base"] = impl.base;
          j["learning_rate"] = impl.learning_rate;
          j["training_loss"] = impl.training_loss;
          Json trees = Json::array();
          for (const DecisionTree& t : impl.trees) trees.push_back(detail::tree_to_json(t));
          j["trees"] = trees;
        } else if constexpr (std::is_same_v<M, KnnEnsemble>) {
          j["k"] = impl.k;
          j["classification"] = impl.classification;
          j["mean"] = impl.mean;
          j["scale"] = impl.scale;
          j["points"] = impl.points;
          j["labels"] = impl.labels;
          Json learners = Json::array();
          for (const KnnLearner& l : impl.learners) {
            learners.push_back({{"features", l.features}, {"rows", l.rows}});
          }
          j["learners"] = learners;
        }
      },
      m.impl());
  return j;
}

inline FittedModel model_from_json(const nlohmann::ordered_json& j) {
  try {
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw InputError("model json: unknown kind");
    const std::string tk = j.at("target_kind").get<std::string>();
    const TargetKind target = tk == "binary"       ? TargetKind::kBinary
                              : tk == "continuous" ? TargetKind::kContinuous
                                                   : TargetKind::kProportion;
    const auto seed = j.at("seed").get<std::uint64_t>();
    auto features = j.at("features").get<std::vector<std::string>>();
    FittedModel::Impl impl;
    switch (*kind) {
      case ModelKind::kMean:
        impl = MeanModel{j.at("value").get<double>()};
        break;
      case ModelKind::kOls:
      case ModelKind::kLogit: {
        LinearFit f;
        f.kind = *kind == ModelKind::kOls ? LinearKind::kOls : LinearKind::kLogit;
        f.names = j.at("names").get<std::vector<std::string>>();
        f.coefficients = j.at("coefficients").get<std::vector<double>>();
        f.std_errors = detail::doubles(j.at("std_errors"));
        f.statistics = detail::doubles(j.at("statistics"));
        f.p_values = detail::doubles(j.at("p_values"));
        f.n = j.at("n").get<std::size_t>();
        f.rss = j.at("rss").get<double>();
        f.r_squared = j.at("r_squared").get<double>();
        f.deviance = j.at("deviance").get<double>();
        f.iterations = j.at("iterations").get<int>();
        f.converged = j.at("converged").get<bool>();
        f.separation_warning = j.at("separation_warning").get<bool>();
        impl = std::move(f);
        break;
      }
      case ModelKind::kTree:
        impl = detail::tree_from_json(j.at("tree"));
        break;
      case ModelKind::kLsBoost: {
        BoostedTrees b;
        b.base = j.at("base").get<double>();
        b.learning_rate = j.at("learning_rate").get<double>();
        b.training_loss = j.at("training_loss").get<std::vector<double>>();
        for (const auto& t : j.at("trees")) b.trees.push_back(detail::tree_from_json(t));
        impl = std::move(b);
        break;
      }
      case ModelKind::kKnnEnsemble: {
        KnnEnsemble e;
        e.k = j.at("k").get<int>();
        e.classification = j.at("classification").get<bool>();
        e.mean = j.at("mean").get<std::vector<double>>();
        e.scale = j.at("scale").get<std::vector<double>>();
        e.points = j.at("points").get<std::vector<std::vector<double>>>();
        e.labels = j.at("labels").get<std::vector<double>>();
        for (const auto& l : j.at("learners")) {
          e.learners.push_back({l.at("features").get<std::vector<std::size_t>>(),
                                l.at("rows").get<std::vector<std::size_t>>()});
        }
        impl = std::move(e);
        break;
      }
    }
    return FittedModel(*kind, std::move(features), target, seed, std::move(impl));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model json: ") + e.what());
  }
}

}  // namespace trustlab::modeling
