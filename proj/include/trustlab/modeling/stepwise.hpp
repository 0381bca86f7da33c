#pragma once

// Greedy bidirectional feature selection for OLS and logit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trustlab/error.hpp"
#include "trustlab/modeling/cv.hpp"
#include "trustlab/modeling/linear.hpp"
#include "trustlab/modeling/model.hpp"
#include "trustlab/modeling/table.hpp"

namespace trustlab::modeling {

enum class StepCriterion { kCvLoss, kAic, kBic };

inline std::string_view to_string(StepCriterion c) {
  switch (c) {
    case StepCriterion::kCvLoss: return "cv";
    case StepCriterion::kAic: return "aic";
    case StepCriterion::kBic: return "bic";
  }
  return "?";
}

inline std::optional<StepCriterion> parse_step_criterion(std::string_view s) {
  if (s == "cv") return StepCriterion::kCvLoss;
  if (s == "aic") return StepCriterion::kAic;
  if (s == "bic") return StepCriterion::kBic;
  return std::nullopt;
}

struct StepwiseOptions {
  StepCriterion criterion = StepCriterion::kCvLoss;
  int folds = 10;
  std::uint64_t seed = 0;
  LogitOptions logit;
  int max_steps = 200;
};

struct StepwiseStep {
  std::string action;  // "start", "add" or "remove"
  std::string feature;
  double value = 0.0;  // criterion after the step
};

struct StepwiseResult {
  FittedModel model;
  std::vector<std::string> selected;  // in table column order
  std::vector<StepwiseStep> log;
};

namespace detail {

inline double log_loss(double p, double y) {
  constexpr double kEps = 1e-15;
  p = std::clamp(p, kEps, 1.0 - kEps);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

inline LinearFit fit_linear(const FeatureTable& t, LinearKind kind,
                            const LogitOptions& opt) {
  return kind == LinearKind::kOls ? fit_ols(t) : fit_logit(t, opt);
}

// Criterion for one candidate column set; nullopt when the fit is singular or
// underdetermined.
inline std::optional<double> step_score(const FeatureTable& t,
                                        const std::vector<std::size_t>& cols,
                                        LinearKind kind,
                                        const StepwiseOptions& opt,
                                        const std::vector<int>& fold) {
  const FeatureTable sub = t.select_columns(cols);
  try {
    if (opt.criterion != StepCriterion::kCvLoss) {
      const LinearFit f = fit_linear(sub, kind, opt.logit);
      const double n = static_cast<double>(f.n);
      const double p = static_cast<double>(f.num_parameters());
      const double fit_term =
          kind == LinearKind::kOls
              ? n * std::log(std::max(f.rss, std::numeric_limits<double>::min()) / n)
              : f.deviance;
      const double penalty = opt.criterion == StepCriterion::kAic ? 2.0 : std::log(n);
      return fit_term + penalty * p;
    }
    double loss = 0.0;
    for (int k = 0; k < opt.folds; ++k) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < fold.size(); ++i) {
        (fold[i] == k ? test : train).push_back(i);
      }
      const LinearFit f = fit_linear(sub.select_rows(train), kind, opt.logit);
      for (std::size_t i : test) {
        const double pred = f.predict(sub.row(i));
        const double y = sub.target()[i];
        loss += kind == LinearKind::kOls ? (pred - y) * (pred - y) : log_loss(pred, y);
      }
    }
    return loss / static_cast<double>(fold.size());
  } catch (const NumericalError&) {
    return std::nullopt;
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Starts from the intercept-only model. Each step evaluates every single
// addition and removal and takes the one with the lowest criterion, provided
// it strictly improves; ties go to the earliest column, additions before
// removals. CV folds are fixed once so that scores are comparable across steps.
inline StepwiseResult stepwise(const FeatureTable& t, ModelKind kind,
                               const StepwiseOptions& opt = {}) {
  if (kind != ModelKind::kOls && kind != ModelKind::kLogit) {
    throw InputError("stepwise selection supports ols and logit only");
  }
  if (kind == ModelKind::kLogit && t.kind() == TargetKind::kContinuous) {
    throw InputError("logit needs a binary or proportion target");
  }
  const LinearKind lk = kind == ModelKind::kOls ? LinearKind::kOls : LinearKind::kLogit;
  std::vector<int> fold;
  if (opt.criterion == StepCriterion::kCvLoss) {
    fold = make_folds(t.target(), opt.folds, opt.seed, is_classification(t.kind()));
  }

  std::vector<bool> in(t.cols(), false);
  auto current = [&] {
    std::vector<std::size_t> c;
    for (std::size_t j = 0; j < in.size(); ++j)
      if (in[j]) c.push_back(j);
    return c;
  };

  std::vector<StepwiseStep> log;
  const std::optional<double> start = detail::step_score(t, {}, lk, opt, fold);
  if (!start) throw NumericalError("stepwise: intercept-only model failed to fit");
  double best = *start;
  log.push_back({"start", "", best});

  for (int step = 0; step < opt.max_steps; ++step) {
    std::optional<std::size_t> pick;
    double pick_value = best;
    for (int pass = 0; pass < 2; ++pass) {
      const bool adding = pass == 0;
      for (std::size_t j = 0; j < t.cols(); ++j) {
        if (in[j] == adding) continue;
        in[j] = adding;
        const auto v = detail::step_score(t, current(), lk, opt, fold);
        in[j] = !adding;
        if (v && *v < pick_value) {
          pick_value = *v;
          pick = j;
        }
      }
    }
    if (!pick) break;
    in[*pick] = !in[*pick];
    best = pick_value;
    log.push_back({in[*pick] ? "add" : "remove", t.name(*pick), best});
  }

  const FeatureTable final_table = t.select_columns(current());
  ModelParams mp;
  mp.logit = opt.logit;
  mp.seed = opt.seed;
  return {fit_model(final_table, kind, mp), final_table.names(), std::move(log)};
}

}  // namespace trustlab::modeling
