#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "goxlens/econometrics/distributions.hpp"
#include "goxlens/econometrics/ols.hpp"
#include "goxlens/error.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

/// y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t, fitted on rows of a
/// T x k data matrix (one row per time step).
template <typename Scalar>
struct VarModel {
  VecX<Scalar> intercept;
  std::vector<MatX<Scalar>> coefficients;  ///< A_1..A_p, each k x k
  MatX<Scalar> sigma_u;
  MatX<Scalar> residuals;  ///< (T - p) x k
  VecX<Scalar> mean_abs;   ///< mean |y_j| over the fitted data
  std::vector<std::string> names;
  Eigen::Index nobs = 0;  ///< effective sample T - p
  bool rank_deficient = false;

  Eigen::Index k() const { return intercept.size(); }
  Eigen::Index lag_order() const { return static_cast<Eigen::Index>(coefficients.size()); }

  MatX<Scalar> companion() const {
    const Eigen::Index kk = k(), p = lag_order();
    MatX<Scalar> C = MatX<Scalar>::Zero(kk * p, kk * p);
    for (Eigen::Index i = 0; i < p; ++i) C.block(0, i * kk, kk, kk) = coefficients[static_cast<std::size_t>(i)];
    if (p > 1) C.bottomLeftCorner(kk * (p - 1), kk * (p - 1)).setIdentity();
    return C;
  }

  Scalar spectral_radius() const {
    if (lag_order() == 0) return 0;
    const Eigen::EigenSolver<MatX<Scalar>> es(companion(), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  bool stable() const { return spectral_radius() < 1; }
};

namespace detail {

/// Rows [first, T) of [1, y_{t-1}', ..., y_{t-p}'].
template <typename Scalar>
MatX<Scalar> var_design(const MatX<Scalar>& Y, Eigen::Index p, Eigen::Index first) {
  const Eigen::Index T = Y.rows(), k = Y.cols();
  MatX<Scalar> Z(T - first, 1 + k * p);
  Z.col(0).setOnes();
  for (Eigen::Index l = 1; l <= p; ++l) Z.block(0, 1 + (l - 1) * k, T - first, k) = Y.middleRows(first - l, T - first);
  return Z;
}

template <typename Scalar>
Scalar log_det_spd(MatX<Scalar> S) {
  Eigen::LLT<MatX<Scalar>> llt(S);
  if (llt.info() != Eigen::Success) {
    S.diagonal().array() += Scalar(1e-10) * std::max(S.trace(), std::numeric_limits<Scalar>::min());
    llt.compute(S);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<Scalar>::infinity();
  }
  return 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// Equation-by-equation OLS (minimum-norm if the design is rank deficient).
/// Sigma_u uses the T - k p - 1 denominator.
template <typename Derived>
VarModel<typename Derived::Scalar> var_fit(const Eigen::MatrixBase<Derived>& data, Eigen::Index p,
                                           std::vector<std::string> names = {}) {
  using Scalar = typename Derived::Scalar;
  const MatX<Scalar> Y = data;
  const Eigen::Index T = Y.rows(), k = Y.cols();
  if (p < 1) throw InsufficientDataError("var_fit: lag order must be >= 1");
  const Eigen::Index Te = T - p;
  if (Te <= k * p + 1)
    throw InsufficientDataError("var_fit: " + std::to_string(Te) + " usable observations for " + std::to_string(k) +
                                " variables at lag " + std::to_string(p));
  const MatX<Scalar> Z = detail::var_design(Y, p, p);
  const MatX<Scalar> target = Y.bottomRows(Te);
  const Eigen::CompleteOrthogonalDecomposition<MatX<Scalar>> cod(Z);
  const MatX<Scalar> B = cod.solve(target);

  VarModel<Scalar> m;
  m.rank_deficient = cod.rank() < Z.cols();
  m.intercept = B.row(0).transpose();
  for (Eigen::Index l = 0; l < p; ++l) m.coefficients.push_back(B.middleRows(1 + l * k, k).transpose());
  m.residuals = target - Z * B;
  m.sigma_u = m.residuals.transpose() * m.residuals / static_cast<Scalar>(Te - k * p - 1);
  m.sigma_u = (m.sigma_u + m.sigma_u.transpose()) / 2;
  m.mean_abs = Y.cwiseAbs().colwise().mean().transpose();
  m.nobs = Te;
  if (names.empty())
    for (Eigen::Index j = 0; j < k; ++j) names.push_back("y" + std::to_string(j));
  m.names = std::move(names);
  return m;
}

/// Lag order in 1..p_max minimizing ln det(Sigma_ML(p)) + 2 p k^2 / T on the
/// common sample that drops the first p_max observations.
template <typename Derived>
Eigen::Index select_lag_aic(const Eigen::MatrixBase<Derived>& data, Eigen::Index p_max) {
  using Scalar = typename Derived::Scalar;
  const MatX<Scalar> Y = data;
  const Eigen::Index T = Y.rows(), k = Y.cols();
  if (p_max < 1) throw InsufficientDataError("select_lag_aic: p_max must be >= 1");
  if (p_max == 1) return 1;
  const Eigen::Index Tc = T - p_max;
  if (Tc <= k * p_max + 1) throw InsufficientDataError("select_lag_aic: too few observations for p_max");
  const MatX<Scalar> target = Y.bottomRows(Tc);
  const MatX<Scalar> Zfull = detail::var_design(Y, p_max, p_max);
  Eigen::Index best_p = 1;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index p = 1; p <= p_max; ++p) {
    const MatX<Scalar> Z = Zfull.leftCols(1 + k * p);
    const MatX<Scalar> E = target - Z * least_squares(Z, target);
    const MatX<Scalar> S = E.transpose() * E / static_cast<Scalar>(Tc);
    const Scalar aic = detail::log_det_spd<Scalar>(S) + 2 * static_cast<Scalar>(p * k * k) / static_cast<Scalar>(Tc);
    if (aic < best) {
      best = aic;
      best_p = p;
    }
  }
  return best_p;
}

template <typename Scalar>
struct GrangerResult {
  Eigen::Index cause = 0;
  Eigen::Index effect = 0;
  Eigen::Index lag = 0;
  Scalar f_statistic = 0;
  Scalar p_value = 1;
  Eigen::Index df_num = 0;
  Eigen::Index df_den = 0;
  bool pass = false;  ///< p < 0.05
};

/// F test of whether `lag` lags of column `cause` improve the autoregression
/// of column `effect` (with constant) beyond its own `lag` lags.
template <typename Derived>
GrangerResult<typename Derived::Scalar> granger(const Eigen::MatrixBase<Derived>& data, Eigen::Index cause,
                                                Eigen::Index effect, Eigen::Index lag) {
  using Scalar = typename Derived::Scalar;
  if (lag < 1) throw InsufficientDataError("granger: lag must be >= 1");
  const Eigen::Index T = data.rows();
  const Eigen::Index Te = T - lag;
  const Eigen::Index df_den = Te - 2 * lag - 1;
  if (df_den < 1) throw InsufficientDataError("granger: too few observations for lag " + std::to_string(lag));

  VecX<Scalar> y = data.col(effect).tail(Te);
  MatX<Scalar> Zu(Te, 1 + 2 * lag);
  Zu.col(0).setOnes();
  for (Eigen::Index l = 1; l <= lag; ++l) {
    Zu.col(l) = data.col(effect).segment(lag - l, Te);
    Zu.col(lag + l) = data.col(cause).segment(lag - l, Te);
  }
  const MatX<Scalar> Zr = Zu.leftCols(1 + lag);
  const Scalar rss_r = (y - Zr * least_squares(Zr, y)).squaredNorm();
  const Scalar rss_u = (y - Zu * least_squares(Zu, y)).squaredNorm();
  if (!(rss_u > Scalar(1e-20) * y.squaredNorm())) throw DegenerateInputError("granger: unrestricted regression fits exactly");

  GrangerResult<Scalar> out;
  out.cause = cause;
  out.effect = effect;
  out.lag = lag;
  out.df_num = lag;
  out.df_den = df_den;
  const Scalar f = ((rss_r - rss_u) / static_cast<Scalar>(lag)) / (rss_u / static_cast<Scalar>(df_den));
  out.f_statistic = std::max(f, Scalar(0));
  out.p_value = dist::f_survival(out.f_statistic, static_cast<Scalar>(lag), static_cast<Scalar>(df_den));
  out.pass = out.p_value < Scalar(0.05);
  return out;
}

}  // namespace goxlens
