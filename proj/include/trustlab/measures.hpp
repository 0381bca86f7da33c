#pragma once

// Decision-relevant trust measures: backward-induction SPE, the mixed-Nash
// trustworthiness threshold tau_B, the binary trust index TI, the trust
// regime, and the comparison-level-for-alternatives (CL_alt) shift.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "trustlab/error.hpp"
#include "trustlab/payoff.hpp"

namespace trustlab {

enum class TrusteeChoice { kTrustworthy, kUntrustworthy };
enum class TrustorChoice { kTrust, kNotTrust };

// How the trustee breaks b_r1 == b_r2 within a branch. The trustor never
// trusts on indifference.
enum class TiePolicy {
  kTrustorFavorable,  // column with the larger trustor payoff; column 1 on ties
  kTrustworthy,
  kUntrustworthy,
};

struct SpeOutcome {
  TrusteeChoice trustee_choice_if_trusted;
  TrusteeChoice trustee_choice_if_not_trusted;
  TrustorChoice trustor_choice;
  int predicted_cell;  // 11, 12, 21 or 22

  friend bool operator==(const SpeOutcome&, const SpeOutcome&) = default;
};

namespace detail {

inline TrusteeChoice best_response(double b_tw, double b_utw, double a_tw,
                                   double a_utw, TiePolicy policy) {
  if (b_tw > b_utw) return TrusteeChoice::kTrustworthy;
  if (b_utw > b_tw) return TrusteeChoice::kUntrustworthy;
  switch (policy) {
    case TiePolicy::kTrustworthy:
      return TrusteeChoice::kTrustworthy;
    case TiePolicy::kUntrustworthy:
      return TrusteeChoice::kUntrustworthy;
    case TiePolicy::kTrustorFavorable:
      break;
  }
  return a_tw >= a_utw ? TrusteeChoice::kTrustworthy
                       : TrusteeChoice::kUntrustworthy;
}

inline int column(TrusteeChoice c) {
  return c == TrusteeChoice::kTrustworthy ? 1 : 2;
}

// Backward induction on raw cells; used for games whose utilities have been
// adjusted and may no longer form a valid PayoffMatrix.
inline SpeOutcome backward_induction(const Cells& a, const Cells& b,
                                     TiePolicy policy) {
  SpeOutcome out{};
  out.trustee_choice_if_trusted = best_response(b[0], b[1], a[0], a[1], policy);
  out.trustee_choice_if_not_trusted =
      best_response(b[2], b[3], a[2], a[3], policy);
  const int col_t = column(out.trustee_choice_if_trusted);
  const int col_n = column(out.trustee_choice_if_not_trusted);
  const double a_trust = a[col_t - 1];
  const double a_not = a[2 + col_n - 1];
  out.trustor_choice =
      a_trust > a_not ? TrustorChoice::kTrust : TrustorChoice::kNotTrust;
  out.predicted_cell = out.trustor_choice == TrustorChoice::kTrust
                           ? 10 + col_t
                           : 20 + col_n;
  return out;
}

// |x| is considered zero relative to the magnitude of the trustor's weights.
inline bool near_zero(double x, const InterdependenceWeights& w) {
  const double scale =
      std::max({std::abs(w.rc_a), std::abs(w.fc_a), std::abs(w.bc_a)});
  return std::abs(x) <= 1e-12 * scale || x == 0.0;
}

}  // namespace detail

inline SpeOutcome spe(const PayoffMatrix& m,
                      TiePolicy policy = TiePolicy::kTrustorFavorable) {
  return detail::backward_induction(m.trustor(), m.trustee(), policy);
}

// Probability of trustworthiness at which the trustor is indifferent
// between trusting and not trusting.
inline double nash_threshold(const PayoffMatrix& m) {
  const InterdependenceWeights w = decompose(m);
  if (detail::near_zero(w.bc_a, w)) {
    throw NumericalError("no interior mixed equilibrium (BC_A = 0)");
  }
  return (m.a22() - m.a12()) / (m.a11() + m.a22() - m.a12() - m.a21());
}

inline double nash_threshold(const InterdependenceWeights& w) {
  if (detail::near_zero(w.bc_a, w)) {
    throw NumericalError("no interior mixed equilibrium (BC_A = 0)");
  }
  return 0.5 - w.rc_a / (2.0 * w.bc_a);
}

// Binary trust index: the mismatch probability that equalizes the trustor's
// two rows, (1-TI) a11 + TI a12 == (1-TI) a22 + TI a21.
inline double trust_index(const PayoffMatrix& m) {
  const InterdependenceWeights w = decompose(m);
  if (detail::near_zero(w.fc_a, w)) {
    throw NumericalError("trust index undefined (FC_A = 0)");
  }
  return (m.a11() - m.a22()) / (m.a11() + m.a21() - m.a12() - m.a22());
}

inline double trust_index(const InterdependenceWeights& w) {
  if (detail::near_zero(w.fc_a, w)) {
    throw NumericalError("trust index undefined (FC_A = 0)");
  }
  return 0.5 + w.rc_a / (2.0 * w.fc_a);
}

enum class TrustRegime { kFreelyGiven, kCoerced, kBoundary, kInvalid };

inline std::string_view to_string(TrustRegime r) {
  switch (r) {
    case TrustRegime::kFreelyGiven:
      return "FreelyGiven";
    case TrustRegime::kCoerced:
      return "Coerced";
    case TrustRegime::kBoundary:
      return "Boundary";
    case TrustRegime::kInvalid:
      return "Invalid";
  }
  return "Invalid";
}

inline TrustRegime regime(double ti) {
  if (!(ti > 0.0 && ti < 1.0)) return TrustRegime::kInvalid;
  if (ti > 0.5) return TrustRegime::kFreelyGiven;
  if (ti < 0.5) return TrustRegime::kCoerced;
  return TrustRegime::kBoundary;
}

// Strong (weak) alternatives lower (raise) the trustor's commitment to the
// interaction: RC_A' = RC_A - cl_alt. Every other weight is untouched.
inline InterdependenceWeights apply_cl_alt(InterdependenceWeights w,
                                           double cl_alt) {
  w.rc_a -= cl_alt;
  return w;
}

struct TrustMeasures {
  SpeOutcome spe;
  std::optional<double> tau_b;
  std::optional<double> ti;
  TrustRegime regime = TrustRegime::kInvalid;
  // Present when a CL_alt shift was requested. The shift acts on the
  // normalized weight scale.
  std::optional<double> cl_alt;
  std::optional<double> tau_b_transformed;
  std::optional<double> ti_transformed;
  std::optional<TrustRegime> regime_transformed;
};

inline TrustMeasures compute_measures(
    const PayoffMatrix& m, std::optional<double> cl_alt = {},
    TiePolicy policy = TiePolicy::kTrustorFavorable) {
  TrustMeasures out;
  out.spe = spe(m, policy);
  const InterdependenceWeights w = decompose(normalize(m));
  auto try_eval = [](auto&& f) -> std::optional<double> {
    try {
      return f();
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  out.tau_b = try_eval([&] { return nash_threshold(w); });
  out.ti = try_eval([&] { return trust_index(w); });
  out.regime = out.ti ? regime(*out.ti) : TrustRegime::kInvalid;
  if (cl_alt) {
    const InterdependenceWeights shifted = apply_cl_alt(w, *cl_alt);
    out.cl_alt = cl_alt;
    out.tau_b_transformed = try_eval([&] { return nash_threshold(shifted); });
    out.ti_transformed = try_eval([&] { return trust_index(shifted); });
    out.regime_transformed = out.ti_transformed
                                 ? regime(*out.ti_transformed)
                                 : TrustRegime::kInvalid;
  }
  return out;
}

}  // namespace trustlab
