#pragma once

#include <cstdint>
#include <vector>

#include "goxlens/rng.hpp"
#include "goxlens/types.hpp"

namespace testing {

inline goxlens::VecXd white_noise(std::int64_t n, std::uint64_t seed) {
  goxlens::CounterRng rng(seed, 101);
  goxlens::VecXd v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

inline goxlens::VecXd random_walk(std::int64_t n, std::uint64_t seed) {
  goxlens::VecXd v = white_noise(n, seed);
  for (std::int64_t t = 1; t < n; ++t) v(t) += v(t - 1);
  return v;
}

inline goxlens::VecXd ar1(std::int64_t n, double phi, std::uint64_t seed) {
  goxlens::VecXd v = white_noise(n, seed);
  for (std::int64_t t = 1; t < n; ++t) v(t) += phi * v(t - 1);
  return v;
}

/// Plain recursion y_t = c + sum A_i y_{t-i} + L e_t after `burn` steps.
inline goxlens::MatXd simulate_var(const goxlens::VecXd& c, const std::vector<goxlens::MatXd>& A,
                                   const goxlens::MatXd& chol, std::int64_t T, std::uint64_t seed,
                                   std::int64_t burn = 500) {
  const auto k = c.size();
  const auto p = static_cast<std::int64_t>(A.size());
  goxlens::CounterRng rng(seed, 202);
  goxlens::MatXd Y = goxlens::MatXd::Zero(T + burn, k);
  for (std::int64_t t = 0; t < T + burn; ++t) {
    goxlens::VecXd e(k);
    for (auto& x : e) x = rng.normal();
    goxlens::VecXd y = c + chol * e;
    for (std::int64_t i = 1; i <= p && t - i >= 0; ++i) y += A[static_cast<std::size_t>(i - 1)] * Y.row(t - i).transpose();
    Y.row(t) = y.transpose();
  }
  return Y.bottomRows(T);
}

inline goxlens::MatXd as_matrix(const std::vector<double>& flat, std::int64_t rows, std::int64_t cols) {
  goxlens::MatXd M(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) M(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return M;
}

}  // namespace testing
