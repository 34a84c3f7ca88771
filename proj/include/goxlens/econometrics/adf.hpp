#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "goxlens/econometrics/critical_values.hpp"
#include "goxlens/econometrics/ols.hpp"
#include "goxlens/error.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

enum class LagRule { fixed, aic };

/// Deterministic terms in the test regression.
enum class AdfTerms { constant, none };

template <typename Scalar>
struct AdfResult {
  Scalar statistic = 0;
  Eigen::Index lag = 0;
  Eigen::Index nobs = 0;
  Scalar critical_1pct = 0;
  Scalar critical_5pct = 0;
  Scalar critical_10pct = 0;
  Scalar p_value = 1;
  bool reject_at_5pct = false;
};

/// floor(12 * (n / 100)^(1/4)).
inline Eigen::Index schwert_max_lag(Eigen::Index n) {
  return static_cast<Eigen::Index>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

/// Design for  dy_t  on  [1,] y_{t-1}, dy_{t-1..lag}  using the last `nobs`
/// usable observations.
template <typename Scalar>
void adf_design(const VecX<Scalar>& y, Eigen::Index lag, Eigen::Index nobs, AdfTerms terms, VecX<Scalar>& response,
                MatX<Scalar>& design) {
  const Eigen::Index n = y.size();
  const Eigen::Index off = terms == AdfTerms::constant ? 1 : 0;
  response.resize(nobs);
  design.resize(nobs, off + 1 + lag);
  for (Eigen::Index r = 0; r < nobs; ++r) {
    const Eigen::Index t = n - nobs + r;  // index of y_t, t >= lag + 1
    response(r) = y(t) - y(t - 1);
    if (off) design(r, 0) = 1;
    design(r, off) = y(t - 1);
    for (Eigen::Index l = 1; l <= lag; ++l) design(r, off + l) = y(t - l) - y(t - l - 1);
  }
}

template <typename Scalar>
Scalar adf_aic(const VecX<Scalar>& dy, const MatX<Scalar>& X) {
  const Eigen::Index n = X.rows();
  const VecX<Scalar> beta = MatX<Scalar>(X).completeOrthogonalDecomposition().solve(dy);
  const Scalar rss = (dy - X * beta).squaredNorm();
  return static_cast<Scalar>(n) * std::log(rss / static_cast<Scalar>(n)) + 2 * static_cast<Scalar>(X.cols());
}

}  // namespace detail

/// Augmented Dickey-Fuller test. The statistic is the t-ratio on y_{t-1};
/// critical values come from the MacKinnon (2010) response surface for the
/// regression's deterministic terms at the sample size actually used.
/// With LagRule::aic the lag is chosen over 0..max_lag on a common sample
/// and the regression is then re-run on the full sample for that lag.
template <typename Derived>
AdfResult<typename Derived::Scalar> adf(const Eigen::MatrixBase<Derived>& series, Eigen::Index max_lag,
                                        LagRule rule = LagRule::aic, AdfTerms terms = AdfTerms::constant) {
  using Scalar = typename Derived::Scalar;
  const VecX<Scalar> y = series;
  const Eigen::Index n = y.size();
  if (max_lag < 0) throw InsufficientDataError("adf: negative max_lag");
  if (n < 25 + max_lag)
    throw InsufficientDataError("adf: need at least " + std::to_string(25 + max_lag) + " observations, got " +
                                std::to_string(n));
  if (y.maxCoeff() == y.minCoeff()) throw DegenerateInputError("adf: constant series");

  Eigen::Index lag = max_lag;
  VecX<Scalar> dy;
  MatX<Scalar> X;
  if (rule == LagRule::aic && max_lag > 0) {
    const Eigen::Index common = n - 1 - max_lag;
    detail::adf_design(y, max_lag, common, terms, dy, X);
    const Eigen::Index base = (terms == AdfTerms::constant ? 1 : 0) + 1;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index l = 0; l <= max_lag; ++l) {
      const Scalar aic = detail::adf_aic<Scalar>(dy, X.leftCols(base + l));
      if (aic < best) {
        best = aic;
        lag = l;
      }
    }
  }

  const Eigen::Index nobs = n - 1 - lag;
  detail::adf_design(y, lag, nobs, terms, dy, X);
  const auto fit = ols(dy, X, false);
  const Eigen::Index level_col = terms == AdfTerms::constant ? 1 : 0;
  const Scalar scale = std::max((dy.array() - dy.mean()).matrix().squaredNorm(), dy.squaredNorm());
  if (!(fit.rss > 1e-20 * scale)) throw DegenerateInputError("adf: test regression fits exactly");

  AdfResult<Scalar> out;
  out.lag = lag;
  out.nobs = nobs;
  out.statistic = fit.t_stats(level_col);
  const auto& surface = terms == AdfTerms::constant ? critical::kAdfConstant : critical::kAdfNone;
  const auto& pvals = terms == AdfTerms::constant ? critical::kAdfConstantP : critical::kAdfNoneP;
  out.critical_1pct = static_cast<Scalar>(surface.at(0, static_cast<double>(nobs)));
  out.critical_5pct = static_cast<Scalar>(surface.at(1, static_cast<double>(nobs)));
  out.critical_10pct = static_cast<Scalar>(surface.at(2, static_cast<double>(nobs)));
  out.p_value = static_cast<Scalar>(pvals.p_value(static_cast<double>(out.statistic)));
  out.reject_at_5pct = out.statistic < out.critical_5pct;
  return out;
}

}  // namespace goxlens
