#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "goxlens/econometrics/var.hpp"
#include "goxlens/error.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

/// Orthogonalized impulse responses. responses[h](j, i) is the response of
/// variable j at horizon h to a one-standard-deviation shock in variable i;
/// h = 0 is the impact period.
template <typename Scalar>
struct IrfMatrix {
  std::vector<MatX<Scalar>> responses;  ///< Psi[h] = Phi[h] * P
  std::vector<MatX<Scalar>> ma;         ///< Phi[h]
  MatX<Scalar> impact;                  ///< P, P P' = Sigma_u (+ ridge)
  VecX<Scalar> mean_abs;
  std::vector<Eigen::Index> ordering;
  Scalar ridge = 0;
  Scalar spectral_radius = 0;

  Eigen::Index horizon() const { return static_cast<Eigen::Index>(responses.size()) - 1; }
  bool stable() const { return spectral_radius < 1; }

  Scalar operator()(Eigen::Index h, Eigen::Index j, Eigen::Index i) const {
    return responses[static_cast<std::size_t>(h)](j, i);
  }

  /// 100 * Psi / mean|y_j|. When the level is zero the result is a signed
  /// infinity (NaN for a zero response).
  Scalar percent(Eigen::Index h, Eigen::Index j, Eigen::Index i) const {
    const Scalar r = (*this)(h, j, i);
    const Scalar level = mean_abs(j);
    if (level > 0) return 100 * r / level;
    if (r == 0) return std::numeric_limits<Scalar>::quiet_NaN();
    return r > 0 ? std::numeric_limits<Scalar>::infinity() : -std::numeric_limits<Scalar>::infinity();
  }
};

/// Lower-triangular factor of the covariance under a variable ordering,
/// expressed back in the original variable indexing. A ridge of
/// 1e-10 * trace is added when the covariance is (near) singular.
template <typename Scalar>
MatX<Scalar> ordered_cholesky(const MatX<Scalar>& sigma, const std::vector<Eigen::Index>& ordering, Scalar& ridge) {
  const Eigen::Index k = sigma.rows();
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(k);
  for (Eigen::Index pos = 0; pos < k; ++pos) perm.indices()(ordering[static_cast<std::size_t>(pos)]) = static_cast<int>(pos);
  // perm maps original index -> position; S_perm = Pi S Pi'.
  MatX<Scalar> S = perm * sigma * perm.transpose();
  S = (S + S.transpose()) / 2;
  ridge = 0;
  const Scalar tr = S.diagonal().cwiseAbs().sum();
  if (S.cwiseAbs().maxCoeff() == 0) return MatX<Scalar>::Zero(k, k);
  const Eigen::SelfAdjointEigenSolver<MatX<Scalar>> es(S, Eigen::EigenvaluesOnly);
  const Scalar min_eig = es.eigenvalues().minCoeff();
  if (min_eig < Scalar(-1e-8) * tr || tr == 0) throw AnalysisError("irf: residual covariance is not positive semidefinite");
  Eigen::LLT<MatX<Scalar>> llt;
  if (min_eig > Scalar(1e-12) * tr) llt.compute(S);
  if (min_eig <= Scalar(1e-12) * tr || llt.info() != Eigen::Success) {
    ridge = Scalar(1e-10) * tr;
    S.diagonal().array() += ridge;
    llt.compute(S);
    if (llt.info() != Eigen::Success) throw AnalysisError("irf: covariance factorization failed after ridge");
  }
  const MatX<Scalar> L = llt.matrixL();
  return perm.transpose() * L * perm;
}

template <typename Scalar>
IrfMatrix<Scalar> irf(const VarModel<Scalar>& model, Eigen::Index horizon, std::vector<Eigen::Index> ordering = {}) {
  const Eigen::Index k = model.k(), p = model.lag_order();
  if (ordering.empty()) {
    ordering.resize(static_cast<std::size_t>(k));
    std::iota(ordering.begin(), ordering.end(), Eigen::Index{0});
  }
  {
    auto sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index i = 0; i < k; ++i)
      if (static_cast<Eigen::Index>(sorted.size()) != k || sorted[static_cast<std::size_t>(i)] != i)
        throw AnalysisError("irf: ordering is not a permutation of the model variables");
  }

  IrfMatrix<Scalar> out;
  out.ordering = ordering;
  out.mean_abs = model.mean_abs;
  out.spectral_radius = model.spectral_radius();
  out.impact = ordered_cholesky<Scalar>(model.sigma_u, ordering, out.ridge);
  out.ma.reserve(static_cast<std::size_t>(horizon + 1));
  out.ma.push_back(MatX<Scalar>::Identity(k, k));
  for (Eigen::Index h = 1; h <= horizon; ++h) {
    MatX<Scalar> phi = MatX<Scalar>::Zero(k, k);
    for (Eigen::Index i = 1; i <= std::min(h, p); ++i)
      phi.noalias() += model.coefficients[static_cast<std::size_t>(i - 1)] * out.ma[static_cast<std::size_t>(h - i)];
    out.ma.push_back(std::move(phi));
  }
  for (const auto& phi : out.ma) out.responses.push_back(phi * out.impact);
  return out;
}

}  // namespace goxlens
