#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "goxlens/econometrics/critical_values.hpp"
#include "goxlens/econometrics/ols.hpp"
#include "goxlens/error.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

template <typename Scalar>
struct JohansenResult {
  VecX<Scalar> eigenvalues;  ///< descending, in [0, 1)
  VecX<Scalar> trace;        ///< trace(r) = -T sum_{i >= r} ln(1 - lambda_i), r = 0..k-1
  VecX<Scalar> max_eigen;    ///< -T ln(1 - lambda_r)
  VecX<Scalar> trace_critical_95;
  VecX<Scalar> max_eigen_critical_95;
  Eigen::Index rank = 0;  ///< first r whose trace test fails to reject, k if none
  Eigen::Index nobs = 0;
  Eigen::Index diff_lags = 0;
};

namespace detail {

/// Columns of R that add nothing beyond the columns before them, judged on
/// unit-norm columns so the threshold matches the correlation test.
template <typename Scalar>
std::vector<std::size_t> collinear_columns(const MatX<Scalar>& R, Scalar tol) {
  std::vector<std::size_t> out;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    MatX<Scalar> S(R.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
    for (std::size_t i = 0; i < kept.size(); ++i) S.col(static_cast<Eigen::Index>(i)) = R.col(kept[i]).normalized();
    const Scalar norm = R.col(j).norm();
    S.col(S.cols() - 1) = norm > 0 ? (R.col(j) / norm).eval() : R.col(j).eval();
    Eigen::Index rank = 0;
    if (norm > 0) {
      Eigen::ColPivHouseholderQR<MatX<Scalar>> qr(S);
      qr.setThreshold(tol);
      rank = qr.rank();
    }
    if (rank == static_cast<Eigen::Index>(kept.size()) + 1) kept.push_back(j);
    else out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

template <typename Scalar>
void require_nonsingular(const MatX<Scalar>& S, const MatX<Scalar>& R, const char* which,
                         const std::vector<std::string>& names) {
  const VecX<Scalar> d = S.diagonal();
  bool singular = (d.array() <= 0).any();
  if (!singular) {
    const VecX<Scalar> inv_sd = d.cwiseSqrt().cwiseInverse();
    const MatX<Scalar> corr = inv_sd.asDiagonal() * S * inv_sd.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<MatX<Scalar>> es(corr, Eigen::EigenvaluesOnly);
    singular = es.eigenvalues().minCoeff() < Scalar(1e-10);
  }
  if (!singular) return;
  auto cols = collinear_columns<Scalar>(R, Scalar(1e-5));
  std::string msg = std::string("johansen: ") + which + " is singular; collinear variables:";
  for (auto c : cols) msg += " " + (c < names.size() ? names[c] : std::to_string(c));
  throw SingularMatrixError(msg, std::move(cols));
}

}  // namespace detail

/// Johansen reduced-rank test with a constant in the auxiliary regressions.
/// `diff_lags` is the number of lagged differences (VAR order minus one).
template <typename Derived>
JohansenResult<typename Derived::Scalar> johansen(const Eigen::MatrixBase<Derived>& data, Eigen::Index diff_lags,
                                                  const std::vector<std::string>& names = {}) {
  using Scalar = typename Derived::Scalar;
  const MatX<Scalar> Y = data;
  const Eigen::Index T = Y.rows(), k = Y.cols();
  if (k < 1 || k > static_cast<Eigen::Index>(critical::kJohansenTrace95.size()))
    throw InsufficientDataError("johansen: supports 1..6 variables");
  if (T <= 10 * k) throw InsufficientDataError("johansen: need more than 10 observations per variable");
  if (diff_lags < 0) throw InsufficientDataError("johansen: negative diff_lags");

  const MatX<Scalar> dY = Y.bottomRows(T - 1) - Y.topRows(T - 1);  // dY.row(s) = y_{s+1} - y_s
  const Eigen::Index Te = T - 1 - diff_lags;
  MatX<Scalar> Z2(Te, 1 + k * diff_lags);
  Z2.col(0).setOnes();
  for (Eigen::Index l = 1; l <= diff_lags; ++l) Z2.block(0, 1 + (l - 1) * k, Te, k) = dY.middleRows(diff_lags - l, Te);
  const MatX<Scalar> Z0 = dY.bottomRows(Te);
  const MatX<Scalar> Z1 = Y.middleRows(diff_lags, Te);  // y_{t-1}

  const MatX<Scalar> R0 = Z0 - Z2 * least_squares(Z2, Z0);
  const MatX<Scalar> R1 = Z1 - Z2 * least_squares(Z2, Z1);
  const Scalar inv_T = Scalar(1) / static_cast<Scalar>(Te);
  const MatX<Scalar> S00 = R0.transpose() * R0 * inv_T;
  const MatX<Scalar> S11 = R1.transpose() * R1 * inv_T;
  const MatX<Scalar> S01 = R0.transpose() * R1 * inv_T;
  detail::require_nonsingular<Scalar>(S00, R0, "S00", names);
  detail::require_nonsingular<Scalar>(S11, R1, "S11", names);

  const Eigen::LLT<MatX<Scalar>> llt11(S11);
  const MatX<Scalar> L = llt11.matrixL();
  const MatX<Scalar> Linv = L.template triangularView<Eigen::Lower>().solve(MatX<Scalar>::Identity(k, k));
  const MatX<Scalar> S00inv_S01 = S00.ldlt().solve(S01);
  MatX<Scalar> M = Linv * S01.transpose() * S00inv_S01 * Linv.transpose();
  M = (M + M.transpose()) / 2;
  const Eigen::SelfAdjointEigenSolver<MatX<Scalar>> es(M, Eigen::EigenvaluesOnly);

  JohansenResult<Scalar> out;
  out.nobs = Te;
  out.diff_lags = diff_lags;
  out.eigenvalues = es.eigenvalues().reverse();
  const Scalar upper = Scalar(1) - std::numeric_limits<Scalar>::epsilon();
  for (Eigen::Index i = 0; i < k; ++i) out.eigenvalues(i) = std::clamp(out.eigenvalues(i), Scalar(0), upper);

  const Scalar Tn = static_cast<Scalar>(Te);
  out.trace.resize(k);
  out.max_eigen.resize(k);
  out.trace_critical_95.resize(k);
  out.max_eigen_critical_95.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    Scalar s = 0;
    for (Eigen::Index i = r; i < k; ++i) s += std::log1p(-out.eigenvalues(i));
    out.trace(r) = -Tn * s;
    out.max_eigen(r) = -Tn * std::log1p(-out.eigenvalues(r));
    out.trace_critical_95(r) = static_cast<Scalar>(critical::kJohansenTrace95[static_cast<std::size_t>(k - r - 1)]);
    out.max_eigen_critical_95(r) =
        static_cast<Scalar>(critical::kJohansenMaxEigen95[static_cast<std::size_t>(k - r - 1)]);
  }
  out.rank = k;
  for (Eigen::Index r = 0; r < k; ++r) {
    if (out.trace(r) < out.trace_critical_95(r)) {
      out.rank = r;
      break;
    }
  }
  return out;
}

}  // namespace goxlens
