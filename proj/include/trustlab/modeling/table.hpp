#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trustlab/error.hpp"

namespace trustlab::modeling {

// Proportions and continuous values are regression targets; binary
// decisions are classification targets. Every learner dispatches on this.
enum class TargetKind { kProportion, kBinary, kContinuous };

inline std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::kBinary:
      return "binary";
    case TargetKind::kContinuous:
      return "continuous";
    case TargetKind::kProportion:
      break;
  }
  return "proportion";
}

inline bool is_classification(TargetKind k) { return k == TargetKind::kBinary; }

// Named predictor columns stored row-major plus one target column.
class FeatureTable {
 public:
  FeatureTable() = default;

  FeatureTable(std::vector<std::string> names, std::vector<double> values,
               std::vector<double> target, TargetKind kind)
      : names_(std::move(names)),
        values_(std::move(values)),
        target_(std::move(target)),
        kind_(kind) {
    validate();
  }

  std::size_t rows() const { return target_.size(); }
  std::size_t cols() const { return names_.size(); }

  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t c) const { return names_[c]; }
  const std::vector<double>& target() const { return target_; }
  TargetKind kind() const { return kind_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  FeatureTable select_columns(const std::vector<std::size_t>& cols) const {
    std::vector<std::string> names;
    for (std::size_t c : cols) names.push_back(names_[c]);
    std::vector<double> values;
    values.reserve(rows() * cols.size());
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t c : cols) values.push_back(at(r, c));
    return FeatureTable(std::move(names), std::move(values), target_, kind_);
  }

  FeatureTable select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    for (const std::string& n : names) {
      auto i = index_of(n);
      if (!i) throw InputError("feature table has no column '" + n + "'");
      idx.push_back(*i);
    }
    return select_columns(idx);
  }

  FeatureTable drop_column(std::size_t c) const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < cols(); ++i)
      if (i != c) keep.push_back(i);
    return select_columns(keep);
  }

  FeatureTable select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<double> values;
    std::vector<double> target;
    values.reserve(rows.size() * cols());
    for (std::size_t r : rows) {
      auto src = row(r);
      values.insert(values.end(), src.begin(), src.end());
      target.push_back(target_[r]);
    }
    return FeatureTable(names_, std::move(values), std::move(target), kind_);
  }

  FeatureTable with_target(std::vector<double> target, TargetKind kind) const {
    return FeatureTable(names_, values_, std::move(target), kind);
  }

 private:
  void validate() const {
    if (values_.size() != names_.size() * target_.size()) {
      throw InputError("feature table: value count does not match shape");
    }
    std::set<std::string> seen;
    for (const std::string& n : names_) {
      if (!seen.insert(n).second) {
        throw InputError("feature table: duplicate column '" + n + "'");
      }
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw InputError("feature table: missing or non-finite value");
      }
    }
    for (double t : target_) {
      bool ok = std::isfinite(t);
      if (kind_ == TargetKind::kBinary) ok = t == 0.0 || t == 1.0;
      if (kind_ == TargetKind::kProportion) ok = t >= 0.0 && t <= 1.0;
      if (!ok) {
        throw InputError("feature table: target outside its declared range");
      }
    }
  }

  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<double> target_;
  TargetKind kind_ = TargetKind::kProportion;
};

}  // namespace trustlab::modeling
