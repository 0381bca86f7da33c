#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "trustlab/error.hpp"
#include "trustlab/modeling/table.hpp"
#include "trustlab/modeling/tree.hpp"
#include "trustlab/random.hpp"

namespace trustlab::modeling {

// ---------------------------------------------------------------------------
// Least-squares boosting

struct BoostParams {
  int rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 5;
};

struct BoostedTrees {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  // Training MSE after the base and after each round.
  std::vector<double> training_loss;

  double predict(std::span<const double> x) const {
    double f = base;
    for (const DecisionTree& t : trees) f += learning_rate * t.predict(x);
    return f;
  }
};

inline BoostedTrees fit_lsboost(const FeatureTable& t, const BoostParams& p = {}) {
  if (t.rows() == 0) throw InputError("lsboost: empty training table");
  if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0) || p.rounds < 0) {
    throw InputError("lsboost: learning rate must lie in (0, 1]");
  }
  const std::size_t n = t.rows();
  BoostedTrees model;
  model.learning_rate = p.learning_rate;
  model.base = std::accumulate(t.target().begin(), t.target().end(), 0.0) /
               static_cast<double>(n);
  std::vector<double> f(n, model.base);
  std::vector<double> resid(n);
  auto loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid[i] = t.target()[i] - f[i];
      s += resid[i] * resid[i];
    }
    return s / static_cast<double>(n);
  };
  model.training_loss.push_back(loss());
  const TreeParams tp{p.max_depth, p.min_leaf, 0, 0};
  for (int round = 0; round < p.rounds; ++round) {
    DecisionTree tree = detail::grow_tree(t, resid, false, tp);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += p.learning_rate * tree.predict(t.row(i));
    }
    model.trees.push_back(std::move(tree));
    model.training_loss.push_back(loss());
  }
  return model;
}

// ---------------------------------------------------------------------------
// KNN ensemble

enum class KnnSampling {
  // Each learner sees every row through a random subset of the features.
  kSubspace,
  // Each learner sees a bootstrap sample of rows and every feature.
  kBootstrap,
};

struct KnnParams {
  int k = 5;
  int learners = 30;
  // Features per learner under kSubspace; 0 means ceil(cols / 2).
  int subspace_dim = 0;
  KnnSampling sampling = KnnSampling::kSubspace;
  std::uint64_t seed = 0;
};

struct KnnLearner {
  std::vector<std::size_t> features;
  std::vector<std::size_t> rows;
};

// Features are z-scored with training statistics. Classification learners
// vote with their neighbors' majority label; the ensemble score is the
// fraction of positive votes. Regression averages neighbor targets.
struct KnnEnsemble {
  int k = 5;
  bool classification = true;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<std::vector<double>> points;  // standardized training rows
  std::vector<double> labels;
  std::vector<KnnLearner> learners;

  double learner_vote(const KnnLearner& l, const std::vector<double>& z) const {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(l.rows.size());
    for (std::size_t r : l.rows) {
      double s = 0.0;
      for (std::size_t f : l.features) {
        const double diff = points[r][f] - z[f];
        s += diff * diff;
      }
      d.emplace_back(s, r);
    }
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < kk; ++i) sum += labels[d[i].second];
    const double avg = sum / static_cast<double>(kk);
    if (!classification) return avg;
    return avg >= 0.5 ? 1.0 : 0.0;
  }

  double score(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) z[f] = (x[f] - mean[f]) / scale[f];
    double s = 0.0;
    for (const KnnLearner& l : learners) s += learner_vote(l, z);
    return s / static_cast<double>(learners.size());
  }

  double predict(std::span<const double> x) const {
    const double s = score(x);
    if (!classification) return s;
    return s >= 0.5 ? 1.0 : 0.0;
  }
};

inline KnnEnsemble fit_knn_ensemble(const FeatureTable& t, const KnnParams& p = {}) {
  if (p.k < 1) throw InputError("knn: k must be >= 1");
  if (static_cast<std::size_t>(p.k) > t.rows()) {
    throw InputError("knn: k exceeds the number of rows");
  }
  if (p.learners < 1) throw InputError("knn: needs at least one learner");
  if (t.cols() == 0) throw InputError("knn: needs at least one feature");
  const std::size_t n = t.rows();
  const std::size_t d = t.cols();
  KnnEnsemble m;
  m.k = p.k;
  m.classification = is_classification(t.kind());
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 1.0);
  for (std::size_t f = 0; f < d; ++f) {
    double s = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += t.at(r, f);
    m.mean[f] = s / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double c = t.at(r, f) - m.mean[f];
      ss += c * c;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    m.scale[f] = sd > 0 ? sd : 1.0;
  }
  m.points.resize(n, std::vector<double>(d));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < d; ++f)
      m.points[r][f] = (t.at(r, f) - m.mean[f]) / m.scale[f];
  m.labels = t.target();

  Rng rng(p.seed);
  const std::size_t dim =
      p.subspace_dim > 0 ? std::min<std::size_t>(static_cast<std::size_t>(p.subspace_dim), d)
                         : (d + 1) / 2;
  for (int l = 0; l < p.learners; ++l) {
    KnnLearner learner;
    if (p.sampling == KnnSampling::kSubspace) {
      std::vector<std::size_t> all(d);
      std::iota(all.begin(), all.end(), std::size_t{0});
      rng.shuffle(all);
      learner.features.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(dim));
      std::sort(learner.features.begin(), learner.features.end());
      learner.rows.resize(n);
      std::iota(learner.rows.begin(), learner.rows.end(), std::size_t{0});
    } else {
      learner.features.resize(d);
      std::iota(learner.features.begin(), learner.features.end(), std::size_t{0});
      for (std::size_t i = 0; i < n; ++i) learner.rows.push_back(rng.below(n));
      std::sort(learner.rows.begin(), learner.rows.end());
    }
    m.learners.push_back(std::move(learner));
  }
  return m;
}

}  // namespace trustlab::modeling
