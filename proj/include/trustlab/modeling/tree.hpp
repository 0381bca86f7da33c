#pragma once

// CART trees with axis-aligned splits: squared error for regression, Gini
// impurity for classification, and optional cost-complexity pruning chosen
// by cross-validation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "trustlab/error.hpp"
#include "trustlab/modeling/table.hpp"
#include "trustlab/random.hpp"

namespace trustlab::modeling {

struct TreeParams {
  int max_depth = 4;
  int min_leaf = 5;
  // 0 disables pruning; otherwise the number of CV folds used to pick the
  // cost-complexity parameter.
  int prune_folds = 0;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;  // rows with x[feature] <= threshold
  int right = -1;
  double value = 0.0;              // mean, or majority class
  double positive_fraction = 0.0;  // classification only
  int count = 0;
  // Resubstitution risk: SSE (regression) or misclassified rows.
  double risk = 0.0;
  double impurity_decrease = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(bool classification, std::vector<std::string> names,
               std::vector<TreeNode> nodes)
      : classification_(classification),
        names_(std::move(names)),
        nodes_(std::move(nodes)) {}

  int leaf_index(std::span<const double> x) const {
    int i = 0;
    while (!nodes_[i].is_leaf()) {
      const TreeNode& n = nodes_[i];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return i;
  }

  // Leaf mean (regression) or majority class (classification).
  double predict(std::span<const double> x) const {
    return nodes_[leaf_index(x)].value;
  }

  // Leaf mean (regression) or positive-class fraction (classification).
  double score(std::span<const double> x) const {
    const TreeNode& n = nodes_[leaf_index(x)];
    return classification_ ? n.positive_fraction : n.value;
  }

  bool classification() const { return classification_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& names() const { return names_; }

  int depth() const { return depth_from(0); }

  int leaves() const {
    return static_cast<int>(std::count_if(
        nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  // Total impurity decrease attributed to each feature.
  std::vector<double> importances() const {
    std::vector<double> imp(names_.size(), 0.0);
    for (const TreeNode& n : nodes_)
      if (!n.is_leaf()) imp[n.feature] += n.impurity_decrease;
    return imp;
  }

  // Breakpoints of the weakest-link pruning sequence, ascending.
  std::vector<double> pruning_alphas() const {
    std::vector<double> alphas;
    DecisionTree t = *this;
    while (t.nodes_.size() > 1) {
      const double a = t.weakest_link();
      alphas.push_back(a);
      t = t.prune(a);
    }
    return alphas;
  }

  // Smallest subtree minimizing risk + alpha * leaves.
  DecisionTree prune(double alpha) const {
    std::vector<char> collapse(nodes_.size(), 0);
    // Iterate weakest-link collapses until every internal node has g > alpha.
    std::vector<TreeNode> work = nodes_;
    for (;;) {
      std::vector<double> subtree_risk(work.size(), 0.0);
      std::vector<int> subtree_leaves(work.size(), 0);
      summarize(work, collapse, 0, subtree_risk, subtree_leaves);
      bool any = false;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i].is_leaf() || collapse[i] || !reachable(work, collapse, i))
          continue;
        const double g =
            (work[i].risk - subtree_risk[i]) / (subtree_leaves[i] - 1);
        if (g <= alpha * (1.0 + 1e-12) + 1e-15) {
          collapse[i] = 1;
          any = true;
        }
      }
      if (!any) break;
    }
    return rebuild(collapse);
  }

 private:
  int depth_from(int i) const {
    if (nodes_[i].is_leaf()) return 0;
    return 1 + std::max(depth_from(nodes_[i].left), depth_from(nodes_[i].right));
  }

  static void summarize(const std::vector<TreeNode>& nodes,
                        const std::vector<char>& collapse, int i,
                        std::vector<double>& risk, std::vector<int>& leaves) {
    if (nodes[i].is_leaf() || collapse[i]) {
      risk[i] = nodes[i].risk;
      leaves[i] = 1;
      return;
    }
    summarize(nodes, collapse, nodes[i].left, risk, leaves);
    summarize(nodes, collapse, nodes[i].right, risk, leaves);
    risk[i] = risk[nodes[i].left] + risk[nodes[i].right];
    leaves[i] = leaves[nodes[i].left] + leaves[nodes[i].right];
  }

  static bool reachable(const std::vector<TreeNode>& nodes,
                        const std::vector<char>& collapse, std::size_t target) {
    int i = 0;
    // Walk from the root; nodes are stored in preorder with parents first.
    std::vector<int> stack{0};
    while (!stack.empty()) {
      i = stack.back();
      stack.pop_back();
      if (static_cast<std::size_t>(i) == target) return true;
      if (nodes[i].is_leaf() || collapse[i]) continue;
      stack.push_back(nodes[i].right);
      stack.push_back(nodes[i].left);
    }
    return false;
  }

  double weakest_link() const {
    std::vector<char> none(nodes_.size(), 0);
    std::vector<double> risk(nodes_.size(), 0.0);
    std::vector<int> leaves(nodes_.size(), 0);
    summarize(nodes_, none, 0, risk, leaves);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].is_leaf()) continue;
      best = std::min(best, (nodes_[i].risk - risk[i]) / (leaves[i] - 1));
    }
    return std::max(best, 0.0);
  }

  DecisionTree rebuild(const std::vector<char>& collapse) const {
    std::vector<TreeNode> out;
    copy_node(0, collapse, out);
    return DecisionTree(classification_, names_, std::move(out));
  }

  int copy_node(int i, const std::vector<char>& collapse,
                std::vector<TreeNode>& out) const {
    const int id = static_cast<int>(out.size());
    out.push_back(nodes_[i]);
    if (nodes_[i].is_leaf() || collapse[i]) {
      out[id].feature = -1;
      out[id].left = out[id].right = -1;
      out[id].threshold = 0.0;
      out[id].impurity_decrease = 0.0;
      return id;
    }
    const int l = copy_node(nodes_[i].left, collapse, out);
    const int r = copy_node(nodes_[i].right, collapse, out);
    out[id].left = l;
    out[id].right = r;
    return id;
  }

  bool classification_ = false;
  std::vector<std::string> names_;
  std::vector<TreeNode> nodes_;
};

namespace detail {

struct NodeStats {
  double n = 0, sum = 0, sumsq = 0;
  // Impurity in "total" units: SSE, or n * Gini.
  double impurity(bool classification) const {
    if (n == 0) return 0.0;
    if (classification) {
      const double p = sum / n;
      return n * 2.0 * p * (1.0 - p);
    }
    return std::max(0.0, sumsq - sum * sum / n);
  }
  void add(double y) {
    n += 1;
    sum += y;
    sumsq += y * y;
  }
};

class TreeGrower {
 public:
  TreeGrower(const FeatureTable& x, std::span<const double> y,
             bool classification, const TreeParams& p)
      : x_(x), y_(y), classification_(classification), params_(p) {}

  std::vector<TreeNode> grow() {
    std::vector<std::size_t> rows(x_.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    nodes_.clear();
    build(rows, 0);
    return std::move(nodes_);
  }

 private:
  int build(const std::vector<std::size_t>& rows, int depth) {
    NodeStats s;
    for (std::size_t r : rows) s.add(y_[r]);
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    {
      TreeNode& node = nodes_.back();
      node.count = static_cast<int>(rows.size());
      if (classification_) {
        node.positive_fraction = s.sum / s.n;
        node.value = node.positive_fraction >= 0.5 ? 1.0 : 0.0;
        node.risk = std::min(s.sum, s.n - s.sum);
      } else {
        node.value = s.sum / s.n;
        node.risk = s.impurity(false);
      }
    }
    const double parent = s.impurity(classification_);
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    if (depth >= params_.max_depth || rows.size() < 2 * min_leaf ||
        parent <= 1e-12 * std::max(1.0, s.sumsq)) {
      return id;
    }

    int best_feature = -1;
    double best_cost = parent;
    double best_threshold = 0.0;
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x_.at(a, f) < x_.at(b, f);
      });
      NodeStats left;
      NodeStats right = s;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double yv = y_[order[i]];
        left.add(yv);
        right.n -= 1;
        right.sum -= yv;
        right.sumsq -= yv * yv;
        const double xv = x_.at(order[i], f);
        const double xn = x_.at(order[i + 1], f);
        if (!(xv < xn)) continue;
        if (i + 1 < min_leaf || order.size() - i - 1 < min_leaf) continue;
        const double cost =
            left.impurity(classification_) + right.impurity(classification_);
        if (cost < best_cost - 1e-12 * std::max(1.0, parent)) {
          best_cost = cost;
          best_feature = static_cast<int>(f);
          double mid = 0.5 * (xv + xn);
          if (!(mid < xn)) mid = xv;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> l, r;
    for (std::size_t row : rows) {
      (x_.at(row, static_cast<std::size_t>(best_feature)) <= best_threshold ? l : r)
          .push_back(row);
    }
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    nodes_[id].impurity_decrease = parent - best_cost;
    const int li = build(l, depth + 1);
    const int ri = build(r, depth + 1);
    nodes_[id].left = li;
    nodes_[id].right = ri;
    return id;
  }

  const FeatureTable& x_;
  std::span<const double> y_;
  bool classification_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

inline DecisionTree grow_tree(const FeatureTable& x, std::span<const double> y,
                              bool classification, const TreeParams& p) {
  if (x.rows() == 0) throw InputError("tree: empty training table");
  TreeGrower g(x, y, classification, p);
  return DecisionTree(classification, x.names(), g.grow());
}

// Deterministic fold ids with sizes differing by at most one.
inline std::vector<int> plain_folds(std::size_t n, int k, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % k);
  return fold;
}

}  // namespace detail

inline DecisionTree fit_tree(const FeatureTable& t, const TreeParams& p = {}) {
  const bool cls = is_classification(t.kind());
  DecisionTree full = detail::grow_tree(t, t.target(), cls, p);
  if (p.prune_folds < 2 || full.nodes().size() == 1) return full;

  const std::vector<double> alphas = full.pruning_alphas();
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    candidates.push_back(i + 1 < alphas.size()
                             ? std::sqrt(alphas[i] * alphas[i + 1])
                             : alphas[i]);
  }
  const int k = std::min<int>(p.prune_folds, static_cast<int>(t.rows()));
  const std::vector<int> fold = detail::plain_folds(t.rows(), k, p.seed);
  std::vector<double> cv_risk(candidates.size(), 0.0);
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < t.rows(); ++i) (fold[i] == f ? te : tr).push_back(i);
    if (tr.empty() || te.empty()) continue;
    const FeatureTable train = t.select_rows(tr);
    const DecisionTree grown = detail::grow_tree(train, train.target(), cls, p);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const DecisionTree pruned = grown.prune(candidates[c]);
      for (std::size_t i : te) {
        const double d = pruned.predict(t.row(i)) - t.target()[i];
        cv_risk[c] += cls ? (d != 0.0) : d * d;
      }
    }
  }
  // Ties go to the larger alpha, i.e. the simpler tree.
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (cv_risk[c] <= cv_risk[best]) best = c;
  }
  return full.prune(candidates[best]);
}

}  // namespace trustlab::modeling
