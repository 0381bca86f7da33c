#pragma once

// Linear and binomial (logit) regression with an intercept, plus variance
// inflation factors and VIF-driven pruning.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "trustlab/error.hpp"
#include "trustlab/modeling/table.hpp"

namespace trustlab::modeling {

enum class LinearKind { kOls, kLogit };

struct LinearFit {
  LinearKind kind = LinearKind::kOls;
  std::vector<std::string> names;  // "(intercept)" first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> statistics;  // t for OLS, z for logit
  std::vector<double> p_values;
  std::size_t n = 0;
  double rss = 0.0;       // OLS residual sum of squares
  double r_squared = 0.0;
  double deviance = 0.0;  // logit -2 log-likelihood
  int iterations = 0;
  bool converged = true;
  // Set when the logit coefficients diverged (separation) and were clamped.
  bool separation_warning = false;

  // Prediction for a row of predictors ordered as names[1..].
  double predict(std::span<const double> x) const {
    double eta = coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) eta += coefficients[j + 1] * x[j];
    if (kind == LinearKind::kOls) return eta;
    return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta))
                    : std::exp(eta) / (1.0 + std::exp(eta));
  }

  std::size_t num_parameters() const { return coefficients.size(); }
};

inline constexpr std::string_view kInterceptName = "(intercept)";

namespace detail {

inline Eigen::MatrixXd design(const FeatureTable& t) {
  Eigen::MatrixXd x(t.rows(), t.cols() + 1);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    x(r, 0) = 1.0;
    for (std::size_t c = 0; c < t.cols(); ++c) x(r, c + 1) = t.at(r, c);
  }
  return x;
}

inline Eigen::VectorXd response(const FeatureTable& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.target().data(),
                                           static_cast<Eigen::Index>(t.rows()));
}

inline std::vector<std::string> coefficient_names(const FeatureTable& t) {
  std::vector<std::string> names{std::string(kInterceptName)};
  names.insert(names.end(), t.names().begin(), t.names().end());
  return names;
}

// Rank-revealing QR of the design; throws naming the dependent columns.
inline Eigen::ColPivHouseholderQR<Eigen::MatrixXd> checked_qr(
    const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    std::string offending;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < x.cols(); ++k) {
      if (!offending.empty()) offending += ", ";
      offending += names[static_cast<std::size_t>(perm(k))];
    }
    throw NumericalError("singular design: linearly dependent columns: " +
                         offending);
  }
  return qr;
}

inline double logistic(double eta) {
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta))
                  : std::exp(eta) / (1.0 + std::exp(eta));
}

}  // namespace detail

inline LinearFit fit_ols(const FeatureTable& t) {
  const std::size_t p = t.cols() + 1;
  if (t.rows() <= p) {
    throw InputError("ols: needs more rows than coefficients");
  }
  const Eigen::MatrixXd x = detail::design(t);
  const Eigen::VectorXd y = detail::response(t);
  LinearFit fit;
  fit.kind = LinearKind::kOls;
  fit.names = detail::coefficient_names(t);
  fit.n = t.rows();
  const auto qr = detail::checked_qr(x, fit.names);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  fit.rss = resid.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  fit.r_squared = tss > 0 ? 1.0 - fit.rss / tss : 1.0;

  const double df = static_cast<double>(t.rows() - p);
  const double sigma2 = fit.rss / df;
  const Eigen::MatrixXd xtx_inv =
      (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  boost::math::students_t dist(df);
  for (std::size_t j = 0; j < p; ++j) {
    const double b = beta(static_cast<Eigen::Index>(j));
    const double se = std::sqrt(std::max(
        0.0, sigma2 * xtx_inv(static_cast<Eigen::Index>(j),
                              static_cast<Eigen::Index>(j))));
    fit.coefficients.push_back(b);
    fit.std_errors.push_back(se);
    if (se > 0) {
      const double stat = b / se;
      fit.statistics.push_back(stat);
      fit.p_values.push_back(2.0 * boost::math::cdf(
                                       boost::math::complement(dist, std::abs(stat))));
    } else {
      fit.statistics.push_back(b == 0 ? 0.0
                                      : std::copysign(
                                            std::numeric_limits<double>::infinity(), b));
      fit.p_values.push_back(b == 0 ? 1.0 : 0.0);
    }
  }
  return fit;
}

struct LogitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  // Coefficients beyond this magnitude indicate separation and are clamped.
  double clamp = 30.0;
};

// Iteratively reweighted least squares. Targets may be proportions.
inline LinearFit fit_logit(const FeatureTable& t, const LogitOptions& opt = {}) {
  const std::size_t p = t.cols() + 1;
  if (t.rows() <= p) {
    throw InputError("logit: needs more rows than coefficients");
  }
  const Eigen::MatrixXd x = detail::design(t);
  const Eigen::VectorXd y = detail::response(t);
  LinearFit fit;
  fit.kind = LinearKind::kLogit;
  fit.names = detail::coefficient_names(t);
  fit.n = t.rows();
  detail::checked_qr(x, fit.names);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd mu(x.rows());
  Eigen::VectorXd w(x.rows());
  auto refresh = [&] {
    const Eigen::VectorXd eta = x * beta;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      mu(i) = detail::logistic(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
  };
  fit.converged = false;
  refresh();
  for (fit.iterations = 0; fit.iterations < opt.max_iterations;
       ++fit.iterations) {
    const Eigen::VectorXd grad = x.transpose() * (y - mu);
    if (grad.norm() < opt.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    const Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd step = h.ldlt().solve(grad);
    if (!step.allFinite()) {
      throw NumericalError("logit: information matrix is singular");
    }
    beta += step;
    if (beta.cwiseAbs().maxCoeff() > opt.clamp) {
      beta = beta.cwiseMax(-opt.clamp).cwiseMin(opt.clamp);
      fit.separation_warning = true;
      refresh();
      break;
    }
    refresh();
  }

  fit.deviance = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = std::clamp(mu(i), 1e-300, 1.0 - 1e-16);
    double ll = 0.0;
    if (y(i) > 0) ll += y(i) * std::log(m);
    if (y(i) < 1) ll += (1.0 - y(i)) * std::log1p(-m);
    fit.deviance -= 2.0 * ll;
  }
  const Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
  const Eigen::MatrixXd cov =
      h.ldlt().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                               static_cast<Eigen::Index>(p)));
  boost::math::normal normal;
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double se = std::sqrt(std::max(0.0, cov(jj, jj)));
    const double z = se > 0 ? beta(jj) / se : 0.0;
    fit.coefficients.push_back(beta(jj));
    fit.std_errors.push_back(se);
    fit.statistics.push_back(z);
    fit.p_values.push_back(2.0 * boost::math::cdf(
                                     boost::math::complement(normal, std::abs(z))));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Variance inflation

// VIF_j = 1 / (1 - R^2_j), R^2_j from regressing column j on all other
// columns with an intercept. Perfect collinearity yields +infinity.
inline std::vector<double> vif(const FeatureTable& t) {
  if (t.cols() < 2) throw InputError("vif: needs at least two predictors");
  if (t.rows() <= t.cols()) throw InputError("vif: needs more rows than columns");
  const Eigen::Index n = static_cast<Eigen::Index>(t.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(t.cols());
  std::vector<double> out;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      x(r, 0) = 1.0;
      Eigen::Index c2 = 1;
      for (Eigen::Index c = 0; c < k; ++c) {
        const double v = t.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        if (c == j) {
          y(r) = v;
        } else {
          x(r, c2++) = v;
        }
      }
    }
    const double tss = (y.array() - y.mean()).square().sum();
    if (tss <= 0.0) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd resid = y - x * qr.solve(y);
    const double one_minus_r2 = resid.squaredNorm() / tss;
    out.push_back(one_minus_r2 <= 1e-12
                      ? std::numeric_limits<double>::infinity()
                      : 1.0 / one_minus_r2);
  }
  return out;
}

struct VifDrop {
  std::string column;
  double vif;
};

struct VifPruneResult {
  FeatureTable table;
  std::vector<VifDrop> log;
};

// Repeatedly drops the unprotected column with the highest VIF above the
// threshold (first column on ties) until none remains above it.
inline VifPruneResult vif_prune(const FeatureTable& t, double threshold,
                                const std::vector<std::string>& protect = {}) {
  if (!(threshold > 1.0)) throw InputError("vif_prune: threshold must be > 1");
  VifPruneResult res{t, {}};
  while (res.table.cols() >= 2) {
    const std::vector<double> v = vif(res.table);
    std::optional<std::size_t> worst;
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (std::find(protect.begin(), protect.end(), res.table.name(c)) !=
          protect.end()) {
        continue;
      }
      if (v[c] > threshold && (!worst || v[c] > v[*worst])) worst = c;
    }
    if (!worst) break;
    res.log.push_back({res.table.name(*worst), v[*worst]});
    res.table = res.table.drop_column(*worst);
  }
  return res;
}

}  // namespace trustlab::modeling
