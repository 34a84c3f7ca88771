#pragma once

#include <cmath>
#include <limits>

#include "goxlens/econometrics/adf.hpp"
#include "goxlens/econometrics/critical_values.hpp"
#include "goxlens/econometrics/ols.hpp"
#include "goxlens/error.hpp"

namespace goxlens {

template <typename Scalar>
struct EgResult {
  Scalar p_value = 1;
  Scalar adf_statistic = 0;
  Eigen::Index lag = 0;
  Scalar intercept = 0;
  Scalar beta = 0;
  Scalar critical_1pct = 0;
  Scalar critical_5pct = 0;
  Scalar critical_10pct = 0;
  bool collinear = false;  ///< residuals vanish; statistic -inf, p = 0
};

/// Two-step test: OLS of y on x with intercept, then an ADF regression
/// without deterministic terms on the residuals, lag by AIC.
template <typename DerivedY, typename DerivedX>
EgResult<typename DerivedY::Scalar> engle_granger(const Eigen::MatrixBase<DerivedY>& y,
                                                  const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedY::Scalar;
  const Eigen::Index n = y.size();
  if (x.size() != n) throw InsufficientDataError("engle_granger: series lengths differ");
  if (n < 50) throw InsufficientDataError("engle_granger: need at least 50 observations");
  if (x.maxCoeff() == x.minCoeff()) throw DegenerateInputError("engle_granger: constant regressor");

  const MatX<Scalar> X = x.derived().template cast<Scalar>();
  const auto step1 = ols(y, X, true);
  EgResult<Scalar> out;
  out.intercept = step1.coefficients(0);
  out.beta = step1.coefficients(1);
  const double nobs = static_cast<double>(n - 1);
  out.critical_1pct = static_cast<Scalar>(critical::kEngleGrangerConstant2.at(0, nobs));
  out.critical_5pct = static_cast<Scalar>(critical::kEngleGrangerConstant2.at(1, nobs));
  out.critical_10pct = static_cast<Scalar>(critical::kEngleGrangerConstant2.at(2, nobs));

  const Scalar collinear_bound = 1 - 100 * std::sqrt(std::numeric_limits<Scalar>::epsilon());
  bool collinear = !(step1.r_squared < collinear_bound);
  if (!collinear) {
    try {
      const auto res = adf(step1.residuals, schwert_max_lag(n), LagRule::aic, AdfTerms::none);
      out.adf_statistic = res.statistic;
      out.lag = res.lag;
    } catch (const DegenerateInputError&) {
      collinear = true;
    }
  }
  if (collinear) {
    out.collinear = true;
    out.adf_statistic = -std::numeric_limits<Scalar>::infinity();
    out.p_value = 0;
    return out;
  }
  out.p_value = static_cast<Scalar>(critical::kEngleGrangerConstant2P.p_value(static_cast<double>(out.adf_statistic)));
  return out;
}

}  // namespace goxlens
