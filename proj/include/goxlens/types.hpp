#pragma once

#include <Eigen/Dense>

namespace goxlens {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RowVecX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using VecXd = VecX<double>;
using MatXd = MatX<double>;
using RowVecXd = RowVecX<double>;

}  // namespace goxlens
