#pragma once

#include <cmath>
#include <limits>

#include "goxlens/error.hpp"
#include "goxlens/econometrics/distributions.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

/// Ordinary least squares fit. When fitted with an intercept, entry 0 of
/// every coefficient vector is the intercept and entry j+1 belongs to
/// column j of the regressor matrix.
template <typename Scalar>
struct OlsFit {
  VecX<Scalar> coefficients;
  VecX<Scalar> std_errors;
  VecX<Scalar> t_stats;
  VecX<Scalar> p_values;
  VecX<Scalar> residuals;
  Scalar r_squared = 0;
  Scalar adj_r_squared = 0;
  Scalar rss = 0;
  Scalar sigma2 = 0;
  Eigen::Index n = 0;
  Eigen::Index k = 0;  ///< columns in the design, intercept included
  Eigen::Index rank = 0;
  bool intercept = true;
  bool rank_deficient = false;

  /// Coefficient of regressor column j (skips the intercept slot).
  Scalar slope(Eigen::Index j) const { return coefficients(j + (intercept ? 1 : 0)); }
  Scalar slope_p_value(Eigen::Index j) const { return p_values(j + (intercept ? 1 : 0)); }
};

namespace detail {

template <typename Derived>
MatX<typename Derived::Scalar> with_intercept(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  MatX<Scalar> D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

}  // namespace detail

/// Minimum-norm least squares via a complete orthogonal decomposition, with
/// classical standard errors and t-distribution p-values on n - k dof. A
/// rank-deficient design is flagged, not rejected.
template <typename DerivedY, typename DerivedX>
OlsFit<typename DerivedY::Scalar> ols(const Eigen::MatrixBase<DerivedY>& y, const Eigen::MatrixBase<DerivedX>& X,
                                      bool intercept = true) {
  using Scalar = typename DerivedY::Scalar;
  using std::sqrt;
  const Eigen::Index n = y.rows();
  if (X.rows() != n) throw InsufficientDataError("ols: regressor rows do not match response length");
  if (n <= X.cols() + 1) throw InsufficientDataError("ols: need more observations than regressors + 1");

  const MatX<Scalar> D = intercept ? detail::with_intercept(X) : MatX<Scalar>(X);
  const Eigen::CompleteOrthogonalDecomposition<MatX<Scalar>> cod(D);

  OlsFit<Scalar> fit;
  fit.n = n;
  fit.k = D.cols();
  fit.intercept = intercept;
  fit.rank = cod.rank();
  fit.rank_deficient = fit.rank < fit.k;
  fit.coefficients = cod.solve(y.derived().template cast<Scalar>());
  fit.residuals = y - D * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();

  const Scalar dof = static_cast<Scalar>(n - fit.k);
  fit.sigma2 = fit.rss / dof;
  const MatX<Scalar> pinv = cod.pseudoInverse();
  const VecX<Scalar> var_diag = fit.sigma2 * (pinv * pinv.transpose()).diagonal();
  fit.std_errors = var_diag.cwiseMax(Scalar(0)).cwiseSqrt();
  fit.t_stats.resize(fit.k);
  fit.p_values.resize(fit.k);
  for (Eigen::Index j = 0; j < fit.k; ++j) {
    const Scalar se = fit.std_errors(j);
    const Scalar b = fit.coefficients(j);
    Scalar t;
    if (se > 0) t = b / se;
    else if (b == 0) t = std::numeric_limits<Scalar>::quiet_NaN();
    else t = b > 0 ? std::numeric_limits<Scalar>::infinity() : -std::numeric_limits<Scalar>::infinity();
    fit.t_stats(j) = t;
    fit.p_values(j) = std::isnan(t) ? Scalar(1) : dist::student_t_two_sided(t, dof);
  }

  Scalar tss;
  if (intercept) tss = (y.array() - y.mean()).matrix().squaredNorm();
  else tss = y.squaredNorm();
  fit.r_squared = tss > 0 ? 1 - fit.rss / tss : std::numeric_limits<Scalar>::quiet_NaN();
  const Scalar centered = intercept ? 1 : 0;
  fit.adj_r_squared = 1 - (1 - fit.r_squared) * (static_cast<Scalar>(n) - centered) / dof;
  return fit;
}

/// Minimum-norm solution of D * B = Y for a block of responses.
template <typename DerivedD, typename DerivedY>
MatX<typename DerivedD::Scalar> least_squares(const Eigen::MatrixBase<DerivedD>& D,
                                              const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedD::Scalar;
  const Eigen::CompleteOrthogonalDecomposition<MatX<Scalar>> cod(D);
  return cod.solve(Y.derived().template cast<Scalar>());
}

}  // namespace goxlens
