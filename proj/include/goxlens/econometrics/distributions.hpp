#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace goxlens::dist {

namespace detail {

template <typename Scalar>
Scalar beta_continued_fraction(Scalar a, Scalar b, Scalar x) {
  using std::abs;
  constexpr int kMaxIter = 500;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
  const Scalar qab = a + b, qap = a + 1, qam = a - 1;
  Scalar c = 1, d = 1 - qab * x / qap;
  if (abs(d) < tiny) d = tiny;
  d = 1 / d;
  Scalar h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const Scalar m2 = 2 * m;
    Scalar aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar del = d * c;
    h *= del;
    if (abs(del - 1) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
template <typename Scalar>
Scalar incomplete_beta(Scalar a, Scalar b, Scalar x) {
  using std::exp;
  using std::lgamma;
  using std::log;
  using std::log1p;
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const Scalar front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x));
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1 - front * detail::beta_continued_fraction(b, a, 1 - x) / b;
}

/// Regularized upper incomplete gamma Q(a, x).
template <typename Scalar>
Scalar upper_incomplete_gamma(Scalar a, Scalar x) {
  using std::abs;
  using std::exp;
  using std::lgamma;
  using std::log;
  if (x <= 0) return 1;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar log_front = -x + a * log(x) - lgamma(a);
  if (x < a + 1) {
    Scalar ap = a, sum = 1 / a, del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1;
      del *= x / ap;
      sum += del;
      if (abs(del) < abs(sum) * eps) break;
    }
    return 1 - sum * exp(log_front);
  }
  const Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
  Scalar b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const Scalar an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Scalar del = d * c;
    h *= del;
    if (abs(del - 1) < eps) break;
  }
  return exp(log_front) * h;
}

template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  using std::erfc;
  return Scalar(0.5) * erfc(-x / std::numbers::sqrt2_v<Scalar>);
}

/// Two-sided p-value P(|T| > |t|) for Student's t with `dof` degrees of freedom.
template <typename Scalar>
Scalar student_t_two_sided(Scalar t, Scalar dof) {
  using std::isfinite;
  if (!isfinite(t)) return std::isnan(t) ? std::numeric_limits<Scalar>::quiet_NaN() : Scalar(0);
  return incomplete_beta(dof / 2, Scalar(0.5), dof / (dof + t * t));
}

/// Upper tail P(F > f) for the F(d1, d2) distribution.
template <typename Scalar>
Scalar f_survival(Scalar f, Scalar d1, Scalar d2) {
  if (!(f > 0)) return 1;
  if (std::isinf(f)) return 0;
  return incomplete_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

/// Upper tail P(X > x) for chi-square with k degrees of freedom.
template <typename Scalar>
Scalar chi_square_survival(Scalar x, Scalar k) {
  return upper_incomplete_gamma(k / 2, x / 2);
}

}  // namespace goxlens::dist
