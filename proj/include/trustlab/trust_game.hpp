#pragma once

// Trust-game classification under three condition systems: the four
// game-theoretic inequalities, Wagner's conditions, and their restatement
// in interdependence weights. All comparisons are strict; ties fail.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "trustlab/error.hpp"
#include "trustlab/payoff.hpp"

namespace trustlab {

struct GameTheoryConditions {
  bool exposure;     // a12 < min(a21, a22)
  bool improvement;  // a11 > max(a21, a22)
  bool temptation;   // b12 > b11
  bool mutual_gain;  // b11 > max(b21, b22)
};

inline GameTheoryConditions check_game_theory(const PayoffMatrix& m) {
  return {
      m.a12() < std::min(m.a21(), m.a22()),
      m.a11() > std::max(m.a21(), m.a22()),
      m.b12() > m.b11(),
      m.b11() > std::max(m.b21(), m.b22()),
  };
}

struct WagnerParams {
  // Minimum margin a11 - a12 by which trust success must beat trust failure.
  double eps1 = 0.0;
  // Bound on |a21 - a22|; unset disables the independence condition.
  std::optional<double> eps2;
  // Threshold C in [0, 1] for the trustworthiness estimate.
  std::optional<double> threshold_c;

  void validate() const {
    if (!(eps1 >= 0.0) || !std::isfinite(eps1)) {
      throw InputError("wagner eps1 must be finite and >= 0");
    }
    if (eps2 && !(*eps2 > 0.0 && std::isfinite(*eps2))) {
      throw InputError("wagner eps2 must be finite and > 0 when enabled");
    }
    if (threshold_c && !(*threshold_c >= 0.0 && *threshold_c <= 1.0)) {
      throw InputError("wagner threshold C must lie in [0, 1]");
    }
  }
};

struct WagnerReport {
  // Condition 1 (the trustor moves first, under uncertainty) is a modeling
  // assumption of the sequential game, not something payoffs can show.
  bool uncertainty_ordering_assumed = true;
  double eps1 = 0.0;
  std::optional<double> eps2;
  bool exposure_eps = false;      // condition 2
  bool independence_eps = false;  // condition 3
  bool ordering = false;          // condition 4
  bool threshold_defined = false;
  std::optional<bool> threshold;  // condition 5, when evaluable
};

inline WagnerReport check_wagner(const PayoffMatrix& m, const WagnerParams& p,
                                 std::optional<double> p_trustworthy = {}) {
  p.validate();
  WagnerReport r;
  r.eps1 = p.eps1;
  r.eps2 = p.eps2;
  r.exposure_eps = m.a11() - m.a12() > p.eps1;
  r.independence_eps = !p.eps2 || std::abs(m.a21() - m.a22()) < *p.eps2;
  r.ordering = m.a11() > std::max(m.a21(), m.a22()) &&
               std::min(m.a21(), m.a22()) > m.a12();
  r.threshold_defined = p.threshold_c.has_value() && p_trustworthy.has_value();
  if (r.threshold_defined) r.threshold = *p_trustworthy > *p.threshold_c;
  return r;
}

struct InterdependenceConditions {
  bool fc_a_pos;
  bool bc_a_pos;
  bool fc_a_gt_abs_rc_a;
  bool bc_a_gt_abs_rc_a;
  bool temptation_b;   // FC_B > BC_B and FC_B > RC_B
  bool mutual_gain_b;  // FC_B > |BC_B| and FC_B > |RC_B|

  bool trustor_conditions() const {
    return fc_a_pos && bc_a_pos && fc_a_gt_abs_rc_a && bc_a_gt_abs_rc_a;
  }
};

inline InterdependenceConditions check_interdependence(
    const InterdependenceWeights& w) {
  return {
      w.fc_a > 0.0,
      w.bc_a > 0.0,
      w.fc_a > std::abs(w.rc_a),
      w.bc_a > std::abs(w.rc_a),
      w.fc_b > w.bc_b && w.fc_b > w.rc_b,
      w.fc_b > std::abs(w.bc_b) && w.fc_b > std::abs(w.rc_b),
  };
}

enum class Verdict { kTrustorTrustGame, kFullTrustGame, kNotTrustGame };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrustorTrustGame:
      return "TrustorTrustGame";
    case Verdict::kFullTrustGame:
      return "FullTrustGame";
    case Verdict::kNotTrustGame:
      return "NotTrustGame";
  }
  return "NotTrustGame";
}

inline std::optional<Verdict> parse_verdict(std::string_view s) {
  if (s == "TrustorTrustGame") return Verdict::kTrustorTrustGame;
  if (s == "FullTrustGame") return Verdict::kFullTrustGame;
  if (s == "NotTrustGame") return Verdict::kNotTrustGame;
  return std::nullopt;
}

// True when a game with verdict `v` is admitted by a filter asking for
// `wanted`. Every full trust game is also a trustor trust game.
inline bool satisfies(Verdict v, Verdict wanted) {
  switch (wanted) {
    case Verdict::kNotTrustGame:
      return v == Verdict::kNotTrustGame;
    case Verdict::kTrustorTrustGame:
      return v != Verdict::kNotTrustGame;
    case Verdict::kFullTrustGame:
      return v == Verdict::kFullTrustGame;
  }
  return false;
}

struct TrustConditionReport {
  bool exposure;
  bool improvement;
  bool temptation;
  bool mutual_gain;
  WagnerReport wagner;
  InterdependenceConditions interdep;
  // FullTrustGame requires temptation and mutual gain.
  Verdict verdict;
  // FullTrustGame requires temptation only; mutual gain is contested.
  Verdict verdict_lenient;
};

inline TrustConditionReport classify(const PayoffMatrix& m,
                                     const WagnerParams& p = {},
                                     std::optional<double> p_trustworthy = {}) {
  const GameTheoryConditions gt = check_game_theory(m);
  TrustConditionReport r{
      gt.exposure,
      gt.improvement,
      gt.temptation,
      gt.mutual_gain,
      check_wagner(m, p, p_trustworthy),
      check_interdependence(decompose(m)),
      Verdict::kNotTrustGame,
      Verdict::kNotTrustGame,
  };
  if (gt.exposure && gt.improvement) {
    r.verdict = gt.temptation && gt.mutual_gain ? Verdict::kFullTrustGame
                                                : Verdict::kTrustorTrustGame;
    r.verdict_lenient = gt.temptation ? Verdict::kFullTrustGame
                                      : Verdict::kTrustorTrustGame;
  }
  return r;
}

}  // namespace trustlab
