#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "trustlab/error.hpp"

namespace trustlab::modeling {

// Scores and proportions at or above this are read as the positive class.
inline constexpr double kDecisionThreshold = 0.5;

inline int to_label(double v) { return v >= kDecisionThreshold ? 1 : 0; }

inline void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InputError("metrics: predictions and targets must be equal-length "
                     "and nonempty");
  }
}

inline double mse(std::span<const double> pred, std::span<const double> target) {
  check_lengths(pred, target);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

// Mann-Whitney rank statistic with tied scores sharing their average rank.
// Undefined (nullopt) when only one class is present.
inline std::optional<double> roc_auc(std::span<const double> scores,
                                     std::span<const double> target) {
  check_lengths(scores, target);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (to_label(target[order[k]]) == 1) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) /
         (np * static_cast<double>(n_neg));
}

struct ConfusionMatrix {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};

inline ConfusionMatrix confusion(std::span<const double> pred,
                                 std::span<const double> target) {
  check_lengths(pred, target);
  ConfusionMatrix c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = to_label(pred[i]);
    const int t = to_label(target[i]);
    if (p && t) c.tp += 1;
    if (p && !t) c.fp += 1;
    if (!p && !t) c.tn += 1;
    if (!p && t) c.fn += 1;
  }
  return c;
}

// Matthews correlation at the 0.5 threshold; nullopt when any margin of the
// confusion matrix is empty.
inline std::optional<double> mcc(std::span<const double> pred,
                                 std::span<const double> target) {
  const ConfusionMatrix c = confusion(pred, target);
  const double den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn);
  if (den == 0.0) return std::nullopt;
  return (c.tp * c.tn - c.fp * c.fn) / std::sqrt(den);
}

inline double misclassification(std::span<const double> pred,
                                 std::span<const double> target) {
  const ConfusionMatrix c = confusion(pred, target);
  return (c.fp + c.fn) / static_cast<double>(pred.size());
}

}  // namespace trustlab::modeling
