#pragma once

// Internal numeric helpers shared by the distribution code.

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace cpb::detail {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;

// corner clamp applied to copula inputs before density/score evaluation
inline constexpr double kUMin = 1e-12;
inline constexpr double kUMax = 1.0 - 1e-12;
// per-term log-density clamp
inline constexpr double kLogClamp = 1e10;

inline double clamp_unit(double u) { return u < kUMin ? kUMin : (u > kUMax ? kUMax : u); }

inline double clamp_log_term(double x) {
  if (std::isnan(x)) return x;
  return x < -kLogClamp ? -kLogClamp : (x > kLogClamp ? kLogClamp : x);
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z - kLogSqrt2Pi);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / kSqrt2);
}

inline double normal_quantile(double u) {
  return kSqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
}

// log(1 + e^x) without overflow
inline double softplus(double x) {
  return x > 35.0 ? x : std::log1p(std::exp(x));
}

}  // namespace cpb::detail
