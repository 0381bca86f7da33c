#pragma once

// JSON views of single-game analyses.

#include <optional>
#include <string_view>

#include "json.hpp"
#include "trustlab/measures.hpp"
#include "trustlab/payoff.hpp"
#include "trustlab/strategies.hpp"
#include "trustlab/trust_game.hpp"

namespace trustlab {

using Json = nlohmann::ordered_json;

inline std::string_view to_string(TrusteeChoice c) {
  return c == TrusteeChoice::kTrustworthy ? "trustworthy" : "untrustworthy";
}
inline std::string_view to_string(TrustorChoice c) {
  return c == TrustorChoice::kTrust ? "trust" : "not_trust";
}

namespace detail {
template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}
}  // namespace detail

inline Json to_json(const PayoffMatrix& m) {
  return Json{{"a", {m.a11(), m.a12(), m.a21(), m.a22()}},
              {"b", {m.b11(), m.b12(), m.b21(), m.b22()}}};
}

inline Json to_json(const InterdependenceWeights& w) {
  return Json{{"rc_a", w.rc_a}, {"fc_a", w.fc_a}, {"bc_a", w.bc_a},
              {"rc_b", w.rc_b}, {"fc_b", w.fc_b}, {"bc_b", w.bc_b},
              {"normalized", w.normalized}};
}

inline Json to_json(const ConcordanceReport& c) {
  auto player = [](const PlayerConcordance& p) {
    return Json{{"rc", to_string(p.rc)}, {"fc", to_string(p.fc)}};
  };
  return Json{{"correspondence", c.correspondence},
              {"correspondence_indeterminate", c.correspondence_indeterminate},
              {"trustor", player(c.trustor)},
              {"trustee", player(c.trustee)},
              {"zero_sign_policy", ConcordanceReport::kZeroSignPolicy}};
}

inline Json to_json(const TrustConditionReport& r) {
  const WagnerReport& w = r.wagner;
  const InterdependenceConditions& i = r.interdep;
  return Json{
      {"exposure", r.exposure},
      {"improvement", r.improvement},
      {"temptation", r.temptation},
      {"mutual_gain", r.mutual_gain},
      {"wagner",
       {{"uncertainty_ordering_assumed", w.uncertainty_ordering_assumed},
        {"eps1", w.eps1},
        {"eps2", detail::opt_json(w.eps2)},
        {"exposure_eps", w.exposure_eps},
        {"independence_eps", w.independence_eps},
        {"ordering", w.ordering},
        {"threshold_defined", w.threshold_defined},
        {"threshold", detail::opt_json(w.threshold)}}},
      {"interdependence",
       {{"fc_a_pos", i.fc_a_pos},
        {"bc_a_pos", i.bc_a_pos},
        {"fc_a_gt_abs_rc_a", i.fc_a_gt_abs_rc_a},
        {"bc_a_gt_abs_rc_a", i.bc_a_gt_abs_rc_a},
        {"temptation_b", i.temptation_b},
        {"mutual_gain_b", i.mutual_gain_b}}},
      {"verdict", to_string(r.verdict)},
      {"verdict_lenient", to_string(r.verdict_lenient)}};
}

inline Json to_json(const SpeOutcome& s) {
  return Json{{"trustor", to_string(s.trustor_choice)},
              {"trustee_if_trusted", to_string(s.trustee_choice_if_trusted)},
              {"trustee_if_not_trusted", to_string(s.trustee_choice_if_not_trusted)},
              {"predicted_cell", s.predicted_cell}};
}

inline Json to_json(const StrategyFeatures& f) {
  Json j;
  const auto v = feature_values(f);
  for (std::size_t i = 0; i < v.size(); ++i) j[std::string(kFeatureColumns[i])] = v[i];
  return j;
}

struct AnalyzeOptions {
  WagnerParams wagner;
  std::optional<double> p_trustworthy;
  std::optional<double> cl_alt;
  TiePolicy policy = TiePolicy::kTrustorFavorable;
};

// The full single-game report. Weights, measures and the CL_alt shift use the
// normalized scale; raw weights are included for reference.
inline Json analyze(const PayoffMatrix& m, const AnalyzeOptions& opt = {}) {
  const NormalizedPayoffMatrix n = normalize(m);
  const InterdependenceWeights w = decompose(n);
  const TrustMeasures t = compute_measures(m, opt.cl_alt, opt.policy);
  Json j;
  j["payoffs"] = to_json(m);
  j["normalized"] = to_json(n.payoffs);
  j["scale"] = {{"a", n.scale_a}, {"b", n.scale_b}};
  j["weights"] = to_json(w);
  j["weights_raw"] = to_json(decompose(m));
  j["concordance"] = to_json(concordance(w));
  j["conditions"] = to_json(classify(m, opt.wagner, opt.p_trustworthy));
  j["spe"] = to_json(t.spe);
  j["tau_b"] = detail::opt_json(t.tau_b);
  j["ti"] = detail::opt_json(t.ti);
  j["regime"] = to_string(t.regime);
  if (t.cl_alt) {
    j["cl_alt"] = *t.cl_alt;
    j["weights_transformed"] = to_json(apply_cl_alt(w, *t.cl_alt));
    j["tau_b_transformed"] = detail::opt_json(t.tau_b_transformed);
    j["ti_transformed"] = detail::opt_json(t.ti_transformed);
    j["regime_transformed"] = to_string(*t.regime_transformed);
  }
  j["features"] = to_json(seven_strategies(m, opt.policy));
  return j;
}

}  // namespace trustlab
