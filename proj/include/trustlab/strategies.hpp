#pragma once

// Per-game behavioral strategy indicators and the parametric social-
// preference baselines (inequality aversion, ERC, Charness-Rabin).
//
// Indicators that compare payoffs across players use payoffs rescaled per
// player onto [0, 1] by min-max, which is invariant under every positive
// affine transform of either player. The six interdependence weights carried
// alongside use the max-abs normalization.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustlab/data.hpp"
#include "trustlab/error.hpp"
#include "trustlab/measures.hpp"
#include "trustlab/payoff.hpp"

namespace trustlab {

struct StrategyFeatures {
  // trustor
  int ri = 0;      // SPE trust decision
  int lev1 = 0;    // best reply to a uniformly random trustee
  int mm1 = 0;     // maximize the weaker player's payoff in the resolved cell
  int maxmin = 0;  // best worst case against a malicious trustee
  int jm1 = 0;     // maximize joint payoff
  int ia1 = 0;     // minimize payoff difference
  // trustee
  int b1 = 0;   // SPE trustworthiness when trusted
  int mn1 = 0;  // rational, breaking indifference toward the trustor
  int mm2 = 0;  // maximize the weaker player's payoff
  int ia2 = 0;  // minimize payoff difference
  InterdependenceWeights weights;
};

inline constexpr std::array<std::string_view, 16> kFeatureColumns{
    "ri",  "lev1", "mm1", "maxmin", "jm1",  "ia1",  "b1",   "mn1",
    "mm2", "ia2",  "rc_a", "fc_a",  "bc_a", "rc_b", "fc_b", "bc_b"};

inline std::array<double, 16> feature_values(const StrategyFeatures& f) {
  const InterdependenceWeights& w = f.weights;
  return {double(f.ri),  double(f.lev1), double(f.mm1), double(f.maxmin),
          double(f.jm1), double(f.ia1),  double(f.b1),  double(f.mn1),
          double(f.mm2), double(f.ia2),  w.rc_a,        w.fc_a,
          w.bc_a,        w.rc_b,         w.fc_b,        w.bc_b};
}

// Each player's payoffs mapped affinely onto [0, 1].
inline std::pair<Cells, Cells> rescale_unit(const PayoffMatrix& m) {
  auto unit = [](Cells c) {
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    const double min = *lo;
    const double range = *hi - *lo;  // > 0 for a valid matrix
    for (double& x : c) x = (x - min) / range;
    return c;
  };
  return {unit(m.trustor()), unit(m.trustee())};
}

inline StrategyFeatures seven_strategies(
    const PayoffMatrix& m, TiePolicy policy = TiePolicy::kTrustorFavorable) {
  StrategyFeatures f;
  const SpeOutcome s = spe(m, policy);
  const auto [a, b] = rescale_unit(m);
  const int ct = detail::column(s.trustee_choice_if_trusted) - 1;
  const int cn = detail::column(s.trustee_choice_if_not_trusted) - 1;

  f.ri = s.trustor_choice == TrustorChoice::kTrust;
  f.lev1 = m.a11() + m.a12() > m.a21() + m.a22();
  f.mm1 = std::min(a[ct], b[ct]) > std::min(a[2 + cn], b[2 + cn]);
  f.maxmin = std::min(m.a11(), m.a12()) > std::min(m.a21(), m.a22());
  f.jm1 = std::max(a[0] + b[0], a[1] + b[1]) >
          std::max(a[2] + b[2], a[3] + b[3]);
  f.ia1 = std::min(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) <
          std::min(std::abs(a[2] - b[2]), std::abs(a[3] - b[3]));

  f.b1 = s.trustee_choice_if_trusted == TrusteeChoice::kTrustworthy;
  f.mn1 = m.b11() > m.b12() || (m.b11() == m.b12() && m.a11() > m.a12());
  f.mm2 = std::min(a[0], b[0]) > std::min(a[1], b[1]);
  f.ia2 = std::abs(a[0] - b[0]) < std::abs(a[1] - b[1]);

  f.weights = decompose(normalize(m));
  return f;
}

// ---------------------------------------------------------------------------
// Parametric baselines

enum class BaselineKind { kSpe, kInequalityAversion, kErc, kCharnessRabin };

inline std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::kSpe:
      return "spe";
    case BaselineKind::kInequalityAversion:
      return "ia";
    case BaselineKind::kErc:
      return "erc";
    case BaselineKind::kCharnessRabin:
      return "cr";
  }
  return "spe";
}

inline std::optional<BaselineKind> parse_baseline_kind(std::string_view s) {
  if (s == "spe") return BaselineKind::kSpe;
  if (s == "ia") return BaselineKind::kInequalityAversion;
  if (s == "erc") return BaselineKind::kErc;
  if (s == "cr") return BaselineKind::kCharnessRabin;
  return std::nullopt;
}

// Which decision a baseline scores.
enum class Role { kTrustor, kTrustee };

struct BaselineParams {
  BaselineKind kind = BaselineKind::kSpe;
  // ia: (alpha disadvantageous, beta advantageous)
  // erc: (selfish weight, equality weight)
  // cr: (rho weight on the minimum payoff, sigma weight on the mean payoff)
  std::array<double, 2> values{0.0, 0.0};
  // 0 gives hard {0, 1} decisions; > 0 gives a logistic score of the
  // utility gap divided by the temperature.
  double temperature = 0.0;
  bool fitted = false;
  std::optional<double> objective;
};

inline BaselineParams ia_params(double alpha, double beta) {
  return {BaselineKind::kInequalityAversion, {alpha, beta}};
}
inline BaselineParams erc_params(double selfish, double equality) {
  return {BaselineKind::kErc, {selfish, equality}};
}
inline BaselineParams cr_params(double rho, double sigma) {
  return {BaselineKind::kCharnessRabin, {rho, sigma}};
}

namespace detail {

inline double social_utility(double own, double other,
                             const BaselineParams& p) {
  const auto [u, v] = p.values;
  switch (p.kind) {
    case BaselineKind::kSpe:
      return own;
    case BaselineKind::kInequalityAversion:
      return own - u * std::max(other - own, 0.0) -
             v * std::max(own - other, 0.0);
    case BaselineKind::kErc: {
      const double total = own + other;
      const double share = total > 0.0 ? own / total : 0.5;
      return u * own - v * (share - 0.5) * (share - 0.5);
    }
    case BaselineKind::kCharnessRabin:
      return (1.0 - u - v) * own + u * std::min(own, other) +
             v * 0.5 * (own + other);
  }
  return own;
}

inline double squash(double gap, double temperature) {
  if (temperature <= 0.0) return gap > 0.0 ? 1.0 : 0.0;
  return logistic(gap / temperature);
}

// Score on payoffs already rescaled to [0, 1].
inline double baseline_score_unit(const Cells& a, const Cells& b,
                                  const BaselineParams& p, Role role) {
  Cells ua, ub;
  for (int i = 0; i < 4; ++i) {
    ua[i] = social_utility(a[i], b[i], p);
    ub[i] = social_utility(b[i], a[i], p);
  }
  const SpeOutcome s = backward_induction(ua, ub, TiePolicy::kTrustorFavorable);
  if (role == Role::kTrustee) {
    if (p.temperature <= 0.0) {
      return s.trustee_choice_if_trusted == TrusteeChoice::kTrustworthy ? 1.0
                                                                         : 0.0;
    }
    return squash(ub[0] - ub[1], p.temperature);
  }
  if (p.temperature <= 0.0) {
    return s.trustor_choice == TrustorChoice::kTrust ? 1.0 : 0.0;
  }
  const int ct = column(s.trustee_choice_if_trusted) - 1;
  const int cn = column(s.trustee_choice_if_not_trusted) - 1;
  return squash(ua[ct] - ua[2 + cn], p.temperature);
}

}  // namespace detail

inline double baseline_score(const PayoffMatrix& m, const BaselineParams& p,
                             Role role = Role::kTrustor) {
  for (double v : p.values) {
    if (!std::isfinite(v)) throw InputError("baseline parameters must be finite");
  }
  const auto [a, b] = rescale_unit(m);
  return detail::baseline_score_unit(a, b, p, role);
}

inline double ia_predict(const PayoffMatrix& m, const BaselineParams& p,
                         Role role = Role::kTrustor) {
  return baseline_score(m, p, role);
}
inline double erc_predict(const PayoffMatrix& m, const BaselineParams& p,
                          Role role = Role::kTrustor) {
  return baseline_score(m, p, role);
}
inline double cr_predict(const PayoffMatrix& m, const BaselineParams& p,
                         Role role = Role::kTrustor) {
  return baseline_score(m, p, role);
}

// The observed proportion a baseline is fitted against.
inline std::optional<double> observed_target(const GameRecord& r, Role role) {
  if (role == Role::kTrustee) return r.pr_fulfill;
  if (r.pr_trust) return r.pr_trust;
  if (r.trust_decision) return static_cast<double>(*r.trust_decision);
  return std::nullopt;
}

struct BaselineGrid {
  std::array<double, 2> lo;
  std::array<double, 2> hi;
  double step;
};

inline BaselineGrid default_grid(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kInequalityAversion:
      return {{0.0, 0.0}, {5.0, 5.0}, 0.05};
    case BaselineKind::kErc:
      return {{0.05, 0.0}, {1.0, 1.0}, 0.05};
    case BaselineKind::kCharnessRabin:
    case BaselineKind::kSpe:
      break;
  }
  return {{0.0, 0.0}, {1.0, 1.0}, 0.05};
}

struct BaselineFitOptions {
  Role role = Role::kTrustor;
  double temperature = 0.0;
  std::optional<BaselineGrid> grid;
};

// Grid search followed by a shrinking pattern search around the best grid
// point. The first minimum in grid order wins, so results are deterministic.
inline BaselineParams fit_baseline(const std::vector<PayoffMatrix>& games,
                                   const std::vector<double>& targets,
                                   BaselineKind kind,
                                   const BaselineFitOptions& opt = {}) {
  if (games.empty() || games.size() != targets.size()) {
    throw InputError("fit_baseline: empty dataset");
  }
  std::vector<std::pair<Cells, Cells>> unit;
  unit.reserve(games.size());
  for (const PayoffMatrix& m : games) unit.push_back(rescale_unit(m));

  BaselineParams p{kind, {0.0, 0.0}, opt.temperature};
  if (kind == BaselineKind::kErc) p.values = {1.0, 0.0};
  auto mse = [&](const BaselineParams& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < unit.size(); ++i) {
      const double d =
          detail::baseline_score_unit(unit[i].first, unit[i].second, q,
                                      opt.role) -
          targets[i];
      s += d * d;
    }
    return s / static_cast<double>(unit.size());
  };
  const bool is_cr = kind == BaselineKind::kCharnessRabin;
  auto feasible = [&](const std::array<double, 2>& v, const BaselineGrid& g) {
    for (int k = 0; k < 2; ++k)
      if (v[k] < g.lo[k] - 1e-12 || v[k] > g.hi[k] + 1e-12) return false;
    return !is_cr || v[0] + v[1] <= 1.0 + 1e-12;
  };

  double best = mse(p);
  if (kind != BaselineKind::kSpe) {
    const BaselineGrid g = opt.grid.value_or(default_grid(kind));
    const int n0 = static_cast<int>(std::lround((g.hi[0] - g.lo[0]) / g.step));
    const int n1 = static_cast<int>(std::lround((g.hi[1] - g.lo[1]) / g.step));
    bool first = true;
    for (int i = 0; i <= n0; ++i) {
      for (int j = 0; j <= n1; ++j) {
        BaselineParams q = p;
        q.values = {g.lo[0] + i * g.step, g.lo[1] + j * g.step};
        if (!feasible(q.values, g)) continue;
        const double v = mse(q);
        if (first || v < best) {
          best = v;
          p = q;
          first = false;
        }
      }
    }
    for (double step = g.step / 2; step >= 1e-4; step /= 2) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int k = 0; k < 2; ++k) {
          for (double dir : {-1.0, 1.0}) {
            BaselineParams q = p;
            q.values[k] += dir * step;
            if (!feasible(q.values, g)) continue;
            const double v = mse(q);
            if (v < best) {
              best = v;
              p = q;
              improved = true;
            }
          }
        }
      }
    }
  }
  p.fitted = true;
  p.objective = best;
  return p;
}

inline BaselineParams fit_baseline(const GameDataset& ds, BaselineKind kind,
                                   const BaselineFitOptions& opt = {}) {
  std::vector<PayoffMatrix> games;
  std::vector<double> targets;
  for (const GameRecord& r : ds.records) {
    if (auto t = observed_target(r, opt.role)) {
      games.push_back(r.payoffs);
      targets.push_back(*t);
    }
  }
  return fit_baseline(games, targets, kind, opt);
}

}  // namespace trustlab
