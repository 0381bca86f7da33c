#pragma once

// Dataset -> feature table -> named methods -> evaluation reports.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trustlab/data.hpp"
#include "trustlab/error.hpp"
#include "trustlab/format.hpp"
#include "trustlab/measures.hpp"
#include "trustlab/modeling/cv.hpp"
#include "trustlab/modeling/linear.hpp"
#include "trustlab/modeling/metrics.hpp"
#include "trustlab/modeling/model.hpp"
#include "trustlab/modeling/stepwise.hpp"
#include "trustlab/modeling/table.hpp"
#include "trustlab/strategies.hpp"

namespace trustlab {

enum class ResponseChoice { kAuto, kProportion, kDecision };

inline std::optional<ResponseChoice> parse_response_choice(std::string_view s) {
  if (s == "auto") return ResponseChoice::kAuto;
  if (s == "proportion") return ResponseChoice::kProportion;
  if (s == "decision") return ResponseChoice::kDecision;
  return std::nullopt;
}

struct GameTable {
  modeling::FeatureTable table;
  std::vector<PayoffMatrix> games;    // one per table row
  std::vector<std::size_t> source;    // dataset record index per row
};

namespace detail {

inline bool all_binary(const std::vector<double>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

}  // namespace detail

// The 16 strategy features plus "ti" (omitted when any game lacks a defined
// trust index). Trustor targets come from pr_trust (proportion) or
// trust_decision (binary); the trustee target is pr_fulfill, binary when every
// value is 0 or 1. Records without the chosen target are skipped.
inline GameTable build_table(const GameDataset& ds, Role role = Role::kTrustor,
                             ResponseChoice response = ResponseChoice::kAuto) {
  using modeling::TargetKind;
  auto has_all = [&](auto pred) {
    return !ds.records.empty() && std::all_of(ds.records.begin(), ds.records.end(), pred);
  };
  enum class Source { kPrTrust, kDecision, kFulfill } src;
  if (role == Role::kTrustee) {
    if (response == ResponseChoice::kDecision) {
      throw InputError("trustee targets are proportions (pr_fulfill)");
    }
    src = Source::kFulfill;
  } else if (response == ResponseChoice::kProportion) {
    src = Source::kPrTrust;
  } else if (response == ResponseChoice::kDecision) {
    src = Source::kDecision;
  } else {
    const bool pr = has_all([](const GameRecord& r) { return r.pr_trust.has_value(); });
    const bool dec =
        has_all([](const GameRecord& r) { return r.trust_decision.has_value(); });
    src = pr ? Source::kPrTrust : dec ? Source::kDecision : Source::kPrTrust;
  }

  GameTable out;
  std::vector<double> y;
  std::vector<std::optional<double>> ti;
  std::vector<std::array<double, 16>> feats;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const GameRecord& r = ds.records[i];
    std::optional<double> t;
    switch (src) {
      case Source::kPrTrust: t = r.pr_trust; break;
      case Source::kDecision:
        if (r.trust_decision) t = static_cast<double>(*r.trust_decision);
        break;
      case Source::kFulfill: t = r.pr_fulfill; break;
    }
    if (!t) continue;
    y.push_back(*t);
    out.games.push_back(r.payoffs);
    out.source.push_back(i);
    feats.push_back(feature_values(seven_strategies(r.payoffs)));
    try {
      ti.push_back(trust_index(decompose(normalize(r.payoffs))));
    } catch (const NumericalError&) {
      ti.push_back(std::nullopt);
    }
  }
  if (y.empty()) throw InputError("dataset has no rows with the requested target");

  const bool with_ti = std::all_of(ti.begin(), ti.end(), [](auto& v) { return v.has_value(); });
  std::vector<std::string> names(kFeatureColumns.begin(), kFeatureColumns.end());
  if (with_ti) names.push_back("ti");
  std::vector<double> values;
  values.reserve(y.size() * names.size());
  for (std::size_t r = 0; r < y.size(); ++r) {
    values.insert(values.end(), feats[r].begin(), feats[r].end());
    if (with_ti) values.push_back(*ti[r]);
  }
  TargetKind kind = TargetKind::kProportion;
  if (src == Source::kDecision || (src == Source::kFulfill && detail::all_binary(y))) {
    kind = TargetKind::kBinary;
  }
  out.table = modeling::FeatureTable(std::move(names), std::move(values), std::move(y), kind);
  return out;
}

struct PrepareLog {
  std::vector<std::string> constant_dropped;
  std::vector<modeling::VifDrop> vif_dropped;
};

// Removes constant columns, then prunes by VIF. Neither step looks at the
// target.
inline modeling::FeatureTable prepare_features(const modeling::FeatureTable& t,
                                               double vif_threshold,
                                               PrepareLog* log = nullptr) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    const std::vector<double> col = t.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo != *hi) {
      keep.push_back(c);
    } else if (log) {
      log->constant_dropped.push_back(t.name(c));
    }
  }
  modeling::FeatureTable out = t.select_columns(keep);
  if (vif_threshold > 0.0 && out.cols() > 1) {
    modeling::VifPruneResult pr = modeling::vif_prune(out, vif_threshold);
    if (log) log->vif_dropped = pr.log;
    out = std::move(pr.table);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Named methods

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{
      "spe", "ia", "erc", "cr", "mean", "ols", "logit", "tree",
      "lsboost", "knn", "ols_step", "logit_step"};
  return names;
}

struct MethodOptions {
  Role role = Role::kTrustor;
  modeling::ModelParams params;
  modeling::StepwiseOptions stepwise;
  // Baselines produce hard decisions at 0 and logistic scores above.
  double baseline_temperature = 0.0;
};

// Fits a method on the training rows and scores the test rows.
inline std::vector<double> fit_predict(const std::string& method, const GameTable& g,
                                       const std::vector<std::size_t>& train,
                                       const std::vector<std::size_t>& test,
                                       const MethodOptions& opt) {
  if (auto bk = parse_baseline_kind(method)) {
    BaselineParams p;
    p.kind = *bk;
    p.temperature = opt.baseline_temperature;
    if (*bk != BaselineKind::kSpe) {
      std::vector<PayoffMatrix> games;
      std::vector<double> y;
      for (std::size_t i : train) {
        games.push_back(g.games[i]);
        y.push_back(g.table.target()[i]);
      }
      p = fit_baseline(games, y, *bk,
                       {opt.role, opt.baseline_temperature, std::nullopt});
    }
    std::vector<double> out;
    for (std::size_t i : test) out.push_back(baseline_score(g.games[i], p, opt.role));
    return out;
  }
  const modeling::FeatureTable tr = g.table.select_rows(train);
  const modeling::FeatureTable te = g.table.select_rows(test);
  if (method == "ols_step" || method == "logit_step") {
    const auto kind = method == "ols_step" ? modeling::ModelKind::kOls
                                           : modeling::ModelKind::kLogit;
    modeling::StepwiseOptions so = opt.stepwise;
    so.folds = std::min<int>(so.folds, static_cast<int>(tr.rows()));
    return modeling::stepwise(tr, kind, so).model.score(te);
  }
  const auto kind = modeling::parse_model_kind(method);
  if (!kind) throw InputError("unknown method '" + method + "'");
  return modeling::fit_model(tr, *kind, opt.params).score(te);
}

inline void check_method(const std::string& method) {
  const auto& n = method_names();
  if (std::find(n.begin(), n.end(), method) == n.end()) {
    throw InputError("unknown method '" + method + "'");
  }
}

inline std::vector<modeling::EvalReport> evaluate(const GameTable& g,
                                                  const std::vector<std::string>& methods,
                                                  int k, std::uint64_t seed,
                                                  const MethodOptions& opt = {}) {
  for (const std::string& m : methods) check_method(m);
  std::vector<modeling::EvalReport> out;
  for (const std::string& m : methods) {
    modeling::EvalReport rep = modeling::cross_validate(
        g.table.target(), k, seed, modeling::is_classification(g.table.kind()),
        [&](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test) {
          return fit_predict(m, g, train, test, opt);
        });
    rep.method = m;
    out.push_back(std::move(rep));
  }
  return out;
}

// Fit on the estimation split, score both splits.
struct SplitReport {
  std::string method;
  double estimation_mse = 0.0;
  double estimation_loss = 0.0;  // misclassification rate
  double prediction_mse = 0.0;
  double prediction_loss = 0.0;
  std::optional<double> prediction_auc;
  std::optional<double> prediction_mcc;
};

inline std::vector<SplitReport> evaluate_split(const GameDataset& ds, const GameTable& g,
                                               const std::vector<std::string>& methods,
                                               const MethodOptions& opt = {}) {
  for (const std::string& m : methods) check_method(m);
  std::vector<std::size_t> est, pred;
  for (std::size_t i = 0; i < g.source.size(); ++i) {
    const auto& s = ds.records[g.source[i]].split;
    if (!s) throw InputError("dataset lacks split labels; run split first");
    (*s == Split::kEstimation ? est : pred).push_back(i);
  }
  if (est.empty() || pred.empty()) {
    throw InputError("both estimation and prediction splits must be nonempty");
  }
  auto targets = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> y;
    for (std::size_t i : idx) y.push_back(g.table.target()[i]);
    return y;
  };
  const std::vector<double> y_est = targets(est), y_pred = targets(pred);
  std::vector<SplitReport> out;
  for (const std::string& m : methods) {
    std::vector<std::size_t> both = est;
    both.insert(both.end(), pred.begin(), pred.end());
    const std::vector<double> s = fit_predict(m, g, est, both, opt);
    const std::vector<double> s_est(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(est.size()));
    const std::vector<double> s_pred(s.begin() + static_cast<std::ptrdiff_t>(est.size()), s.end());
    out.push_back({m, modeling::mse(s_est, y_est), modeling::misclassification(s_est, y_est),
                   modeling::mse(s_pred, y_pred), modeling::misclassification(s_pred, y_pred),
                   modeling::roc_auc(s_pred, y_pred), modeling::mcc(s_pred, y_pred)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {
inline std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}
inline nlohmann::ordered_json opt_value(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}
}  // namespace detail

inline std::string to_csv(const std::vector<modeling::EvalReport>& reps) {
  std::ostringstream out;
  out << "method,mse,roc_auc,mcc,kfold_loss\n";
  for (const auto& r : reps) {
    out << r.method << ',' << format_double(r.mse) << ',' << detail::opt_field(r.roc_auc)
        << ',' << detail::opt_field(r.mcc) << ',' << format_double(r.kfold_loss) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const std::vector<modeling::EvalReport>& reps) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reps) {
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds) {
      folds.push_back({{"fold", f.fold}, {"size", f.size}, {"mse", f.mse},
                       {"misclassification", f.misclassification}});
    }
    arr.push_back({{"method", r.method},
                   {"mse", r.mse},
                   {"roc_auc", detail::opt_value(r.roc_auc)},
                   {"mcc", detail::opt_value(r.mcc)},
                   {"kfold_loss", r.kfold_loss},
                   {"folds", folds}});
  }
  return arr;
}

inline std::string to_csv(const std::vector<SplitReport>& reps) {
  std::ostringstream out;
  out << "method,estimation_mse,estimation_loss,prediction_mse,prediction_loss,"
         "prediction_auc,prediction_mcc\n";
  for (const auto& r : reps) {
    out << r.method << ',' << format_double(r.estimation_mse) << ','
        << format_double(r.estimation_loss) << ',' << format_double(r.prediction_mse) << ','
        << format_double(r.prediction_loss) << ',' << detail::opt_field(r.prediction_auc)
        << ',' << detail::opt_field(r.prediction_mcc) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const std::vector<SplitReport>& reps) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reps) {
    arr.push_back({{"method", r.method},
                   {"estimation_mse", r.estimation_mse},
                   {"estimation_loss", r.estimation_loss},
                   {"prediction_mse", r.prediction_mse},
                   {"prediction_loss", r.prediction_loss},
                   {"prediction_auc", detail::opt_value(r.prediction_auc)},
                   {"prediction_mcc", detail::opt_value(r.prediction_mcc)}});
  }
  return arr;
}

// Plain-text table, values rounded to four decimals for display.
inline std::string render_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) w[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << (c ? "  " : "") << r[c];
      if (c + 1 < r.size()) out << std::string(w[c] - r[c].size(), ' ');
    }
    out << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (std::size_t c = 0; c < w.size(); ++c) rule.push_back(std::string(w[c], '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return out.str();
}

}  // namespace trustlab
