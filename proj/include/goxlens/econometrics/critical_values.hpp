#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "goxlens/econometrics/distributions.hpp"

namespace goxlens::critical {

/// MacKinnon (2010) response surface: cv(T) = b0 + b1/T + b2/T^2 + b3/T^3,
/// rows are the 1%, 5% and 10% levels.
struct ResponseSurface {
  std::array<std::array<double, 4>, 3> coef;

  double at(std::size_t level, double nobs) const {
    const auto& b = coef[level];
    const double inv = 1.0 / nobs;
    return b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
  }
};

/// Unit-root test with a constant, one I(1) series.
inline constexpr ResponseSurface kAdfConstant{{{{-3.43035, -6.5393, -16.786, -79.433},
                                                {-2.86154, -2.8903, -4.234, -40.04},
                                                {-2.56677, -1.5384, -2.809, 0.0}}}};

/// Unit-root test without deterministic terms.
inline constexpr ResponseSurface kAdfNone{{{{-2.56574, -2.2358, -3.627, 0.0},
                                            {-1.94100, -0.2686, -3.365, 31.223},
                                            {-1.61682, 0.2656, -2.714, 25.364}}}};

/// Residual-based cointegration test, two series, constant.
inline constexpr ResponseSurface kEngleGrangerConstant2{{{{-3.89644, -10.9519, -33.527, 0.0},
                                                          {-3.33613, -6.1101, -6.823, 0.0},
                                                          {-3.04445, -4.2412, -2.72, 0.0}}}};

/// MacKinnon (1994) approximate asymptotic p-value surface.
struct PValueSurface {
  double tau_max;
  double tau_min;
  double tau_star;
  std::array<double, 3> small_p;
  std::array<double, 4> large_p;

  double p_value(double stat) const {
    if (stat > tau_max) return 1.0;
    if (stat < tau_min) return 0.0;
    double poly = 0.0;
    if (stat <= tau_star) {
      for (std::size_t i = small_p.size(); i-- > 0;) poly = poly * stat + small_p[i];
    } else {
      for (std::size_t i = large_p.size(); i-- > 0;) poly = poly * stat + large_p[i];
    }
    return dist::normal_cdf(poly);
  }
};

inline constexpr PValueSurface kAdfConstantP{2.74, -18.83, -1.61, {2.1659, 1.4412, 0.038269},
                                             {1.7339, 0.93202, -0.12745, -0.010368}};
inline constexpr PValueSurface kAdfNoneP{INFINITY, -19.04, -1.04, {0.6344, 1.2378, 0.032496},
                                         {0.4797, 0.93557, -0.06999, 0.033066}};
inline constexpr PValueSurface kEngleGrangerConstant2P{0.92, -18.86, -2.62, {2.92, 1.5012, 0.039796},
                                                       {2.1945, 0.64695, -0.29198, -0.042377}};

/// Johansen 95% critical values, constant in the auxiliary regressions,
/// indexed by the number of common stochastic trends under the null
/// (k - r), 1..6.
inline constexpr std::array<double, 6> kJohansenTrace95{3.8415, 15.4943, 29.7961, 47.8545, 69.8189, 95.7542};
inline constexpr std::array<double, 6> kJohansenMaxEigen95{3.8415, 14.2639, 21.1314, 27.5858, 33.8777, 40.0763};

}  // namespace goxlens::critical
