#pragma once

// Independent reference implementations used to check the library. Nothing
// here calls into trustlab beyond its value types.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "trustlab/payoff.hpp"

namespace oracle {

using trustlab::Cells;
using trustlab::PayoffMatrix;

// Root of f on [lo, hi] where f changes sign; runs to interval exhaustion.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Trustor indifference: tau*a11 + (1-tau)*a12 == tau*a21 + (1-tau)*a22.
inline double tau_b_bisect(const PayoffMatrix& m) {
  return bisect(
      [&](double t) {
        return t * m.a11() + (1 - t) * m.a12() - (t * m.a21() + (1 - t) * m.a22());
      },
      0.0, 1.0);
}

// Mismatch equilibrium: (1-t)*a11 + t*a12 == (1-t)*a22 + t*a21.
inline double ti_bisect(const PayoffMatrix& m) {
  return bisect(
      [&](double t) {
        return (1 - t) * m.a11() + t * m.a12() - ((1 - t) * m.a22() + t * m.a21());
      },
      0.0, 1.0);
}

// Subgame-perfect play found by enumerating every pure trustee strategy
// (choice after trust, choice after no trust) and keeping those that are
// best responses in both subgames. Assumes no payoff ties for the trustee.
struct BruteSpe {
  int trusted_col;    // 1 or 2
  int untrusted_col;  // 1 or 2
  bool trust;
  int cell;
};

inline BruteSpe brute_spe(const PayoffMatrix& m) {
  BruteSpe best{0, 0, false, 0};
  int found = 0;
  for (int ct = 1; ct <= 2; ++ct) {
    for (int cn = 1; cn <= 2; ++cn) {
      const bool ok_t = m.b(1, ct) >= m.b(1, 3 - ct);
      const bool ok_n = m.b(2, cn) >= m.b(2, 3 - cn);
      if (!ok_t || !ok_n) continue;
      const bool trust = m.a(1, ct) > m.a(2, cn);
      best = {ct, cn, trust, trust ? 10 + ct : 20 + cn};
      ++found;
    }
  }
  return found == 1 ? best : BruteSpe{0, 0, false, 0};
}

// Dense Gauss-Jordan with partial pivoting; solves A x = b.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Trustor entries (a11, a12, a21, a22) from (mean, rc, fc, bc) by solving the
// 4x4 system that defines the weights.
inline Cells reconstruct_trustor(double mean, double rc, double fc, double bc) {
  const std::vector<std::vector<double>> m{{0.25, 0.25, 0.25, 0.25},
                                           {0.5, 0.5, -0.5, -0.5},
                                           {0.5, -0.5, 0.5, -0.5},
                                           {0.5, -0.5, -0.5, 0.5}};
  const auto x = solve(m, {mean, rc, fc, bc});
  return {x[0], x[1], x[2], x[3]};
}

// OLS through the normal equations (X'X) beta = X'y with an intercept.
inline std::vector<double> ols_normal(const std::vector<std::vector<double>>& x,
                                      const std::vector<double>& y) {
  const std::size_t p = x.empty() ? 1 : x[0].size() + 1;
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  for (std::size_t r = 0; r < y.size(); ++r) {
    std::vector<double> row{1.0};
    row.insert(row.end(), x[r].begin(), x[r].end());
    for (std::size_t i = 0; i < p; ++i) {
      xty[i] += row[i] * y[r];
      for (std::size_t j = 0; j < p; ++j) xtx[i][j] += row[i] * row[j];
    }
  }
  return solve(xtx, xty);
}

// 1 / (1 - R^2) for column j regressed on the others, via ols_normal.
inline double vif_brute(const std::vector<std::vector<double>>& x, std::size_t j) {
  std::vector<std::vector<double>> others;
  std::vector<double> y;
  for (const auto& row : x) {
    std::vector<double> o;
    for (std::size_t c = 0; c < row.size(); ++c)
      if (c != j) o.push_back(row[c]);
    others.push_back(o);
    y.push_back(row[j]);
  }
  const auto beta = ols_normal(others, y);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    double fit = beta[0];
    for (std::size_t c = 0; c < others[r].size(); ++c) fit += beta[c + 1] * others[r][c];
    ss_res += (y[r] - fit) * (y[r] - fit);
    ss_tot += (y[r] - mean) * (y[r] - mean);
  }
  return 1.0 / (ss_res / ss_tot);
}

// Best single split under squared error: tries every threshold between
// distinct sorted values of every feature. Returns (feature, threshold, sse).
struct BruteSplit {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

inline BruteSplit best_split_sse(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y, std::size_t min_leaf) {
  BruteSplit best;
  const std::size_t n = y.size();
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::vector<double> vals;
    for (const auto& r : x) vals.push_back(r[f]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      const double thr = 0.5 * (vals[i] + vals[i + 1]);
      double sl = 0, sr = 0;
      std::size_t nl = 0, nr = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (x[r][f] <= thr) { sl += y[r]; ++nl; } else { sr += y[r]; ++nr; }
      }
      if (nl < min_leaf || nr < min_leaf) continue;
      const double ml = sl / nl, mr = sr / nr;
      double sse = 0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = y[r] - (x[r][f] <= thr ? ml : mr);
        sse += d * d;
      }
      if (sse < best.sse - 1e-12) best = {static_cast<int>(f), thr, sse};
    }
  }
  return best;
}

// Random games and trust games drawn independently of the library generator.
class GameSampler {
 public:
  explicit GameSampler(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  PayoffMatrix any(double s = 1.0) {
    Cells a, b;
    for (double& v : a) v = uniform(-s, s);
    for (double& v : b) v = uniform(-s, s);
    return PayoffMatrix(a, b);
  }

  // exposure and improvement hold.
  PayoffMatrix trust_game(double s = 1.0) {
    for (;;) {
      PayoffMatrix m = any(s);
      if (m.a12() < std::min(m.a21(), m.a22()) && m.a11() > std::max(m.a21(), m.a22())) {
        return m;
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
