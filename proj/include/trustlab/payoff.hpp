#pragma once

// Payoff representation and interdependence decomposition for 2x2 sequential
// trust interactions.
//
// Layout convention used everywhere in trustlab: row 1 = trustor trusts,
// row 2 = trustor does not trust; column 1 = trustee is trustworthy,
// column 2 = trustee is untrustworthy. Player A is the trustor, B the trustee.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "trustlab/error.hpp"

namespace trustlab {

enum class Player { kTrustor, kTrustee };

inline std::string_view to_string(Player p) {
  return p == Player::kTrustor ? "trustor" : "trustee";
}

// Four payoffs of one player, stored {x11, x12, x21, x22}.
using Cells = std::array<double, 4>;

class PayoffMatrix {
 public:
  // Throws InputError on non-finite entries or when all four entries of a
  // player coincide (the player has no stake in the game).
  PayoffMatrix(const Cells& a, const Cells& b) : a_(a), b_(b) {
    validate(a_, "trustor");
    validate(b_, "trustee");
  }

  PayoffMatrix(double a11, double a12, double a21, double a22, double b11,
               double b12, double b21, double b22)
      : PayoffMatrix(Cells{a11, a12, a21, a22}, Cells{b11, b12, b21, b22}) {}

  double a11() const { return a_[0]; }
  double a12() const { return a_[1]; }
  double a21() const { return a_[2]; }
  double a22() const { return a_[3]; }
  double b11() const { return b_[0]; }
  double b12() const { return b_[1]; }
  double b21() const { return b_[2]; }
  double b22() const { return b_[3]; }

  // row, col in {1, 2}.
  double a(int row, int col) const { return a_[index(row, col)]; }
  double b(int row, int col) const { return b_[index(row, col)]; }

  const Cells& trustor() const { return a_; }
  const Cells& trustee() const { return b_; }
  const Cells& cells(Player p) const {
    return p == Player::kTrustor ? a_ : b_;
  }

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;

 private:
  static int index(int row, int col) { return 2 * (row - 1) + (col - 1); }

  static void validate(const Cells& c, std::string_view who) {
    for (double x : c) {
      if (!std::isfinite(x)) {
        throw InputError(std::string(who) + " payoff is not finite");
      }
    }
    if (c[0] == c[1] && c[1] == c[2] && c[2] == c[3]) {
      throw InputError("degenerate game: all " + std::string(who) +
                       " payoffs are identical");
    }
  }

  Cells a_;
  Cells b_;
};

// Payoffs divided per player by that player's largest absolute entry.
struct NormalizedPayoffMatrix {
  PayoffMatrix payoffs;
  double scale_a;
  double scale_b;
};

inline NormalizedPayoffMatrix normalize(const PayoffMatrix& m) {
  auto scale_of = [](const Cells& c) {
    double s = 0.0;
    for (double x : c) s = std::max(s, std::abs(x));
    if (s == 0.0) throw InputError("zero payoff scale");
    return s;
  };
  const double sa = scale_of(m.trustor());
  const double sb = scale_of(m.trustee());
  Cells a = m.trustor();
  Cells b = m.trustee();
  for (double& x : a) x /= sa;
  for (double& x : b) x /= sb;
  return {PayoffMatrix(a, b), sa, sb};
}

// Positive affine map x -> k*x + c applied to one player's payoffs.
inline PayoffMatrix affine_transform(const PayoffMatrix& m, Player player,
                                     double k, double c) {
  if (!(k > 0.0) || !std::isfinite(k) || !std::isfinite(c)) {
    throw InputError("affine transform requires finite k > 0");
  }
  Cells a = m.trustor();
  Cells b = m.trustee();
  Cells& target = player == Player::kTrustor ? a : b;
  for (double& x : target) x = k * x + c;
  return PayoffMatrix(a, b);
}

// Reflexive (RC), fate (FC) and bilateral (BC) control for both players.
// For the trustee the roles of rows and columns are transposed.
struct InterdependenceWeights {
  double rc_a = 0.0;
  double fc_a = 0.0;
  double bc_a = 0.0;
  double rc_b = 0.0;
  double fc_b = 0.0;
  double bc_b = 0.0;
  bool normalized = false;

  friend bool operator==(const InterdependenceWeights&,
                         const InterdependenceWeights&) = default;
};

inline InterdependenceWeights decompose(const PayoffMatrix& m) {
  InterdependenceWeights w;
  w.rc_a = 0.5 * ((m.a11() + m.a12()) - (m.a21() + m.a22()));
  w.fc_a = 0.5 * ((m.a11() + m.a21()) - (m.a12() + m.a22()));
  w.bc_a = 0.5 * ((m.a11() + m.a22()) - (m.a12() + m.a21()));
  w.rc_b = 0.5 * ((m.b11() + m.b21()) - (m.b12() + m.b22()));
  w.fc_b = 0.5 * ((m.b11() + m.b12()) - (m.b21() + m.b22()));
  w.bc_b = 0.5 * ((m.b11() + m.b22()) - (m.b12() + m.b21()));
  return w;
}

inline InterdependenceWeights decompose(const NormalizedPayoffMatrix& m) {
  InterdependenceWeights w = decompose(m.payoffs);
  w.normalized = true;
  return w;
}

// sign(0) is never defined for control modes, so exact zeros produce
// kIndeterminate instead of being forced to one side.
enum class SignRelation { kConcordant, kDiscordant, kIndeterminate };

inline std::string_view to_string(SignRelation r) {
  switch (r) {
    case SignRelation::kConcordant:
      return "concordant";
    case SignRelation::kDiscordant:
      return "discordant";
    case SignRelation::kIndeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

struct PlayerConcordance {
  SignRelation rc;
  SignRelation fc;
};

struct ConcordanceReport {
  // sign(bc_a) == sign(bc_b), both non-zero.
  bool correspondence;
  // Set when either BC is exactly zero; correspondence is then false.
  bool correspondence_indeterminate;
  PlayerConcordance trustor;
  PlayerConcordance trustee;
  static constexpr std::string_view kZeroSignPolicy = "indeterminate";
};

namespace detail {

inline int sign(double x) { return (x > 0.0) - (x < 0.0); }

inline SignRelation relate(double mode, double bc) {
  const int s = sign(mode);
  const int t = sign(bc);
  if (s == 0 || t == 0) return SignRelation::kIndeterminate;
  return s == t ? SignRelation::kConcordant : SignRelation::kDiscordant;
}

}  // namespace detail

inline ConcordanceReport concordance(const InterdependenceWeights& w) {
  const int sa = detail::sign(w.bc_a);
  const int sb = detail::sign(w.bc_b);
  ConcordanceReport r;
  r.correspondence_indeterminate = sa == 0 || sb == 0;
  r.correspondence = !r.correspondence_indeterminate && sa == sb;
  r.trustor = {detail::relate(w.rc_a, w.bc_a), detail::relate(w.fc_a, w.bc_a)};
  r.trustee = {detail::relate(w.rc_b, w.bc_b), detail::relate(w.fc_b, w.bc_b)};
  return r;
}

}  // namespace trustlab
