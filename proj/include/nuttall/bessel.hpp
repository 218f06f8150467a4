#pragma once

// Modified Bessel function of the first kind I_nu(z) for real nu >= 0 and
// z >= 0: Maclaurin series with the exponential scaling folded into the
// leading factor, and the ratio I_{nu+1}/I_nu by continued fraction.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "nuttall/errors.hpp"
#include "nuttall/log_scaled.hpp"

namespace nuttall {

struct BesselArgument {
  double order = 0.0;
  double arg = 0.0;
};

namespace detail {

inline void check_bessel(const BesselArgument& b) {
  require(b.order >= 0.0 && std::isfinite(b.order), "bessel: order must be non-negative");
  require(b.arg >= 0.0 && !std::isnan(b.arg), "bessel: argument must be non-negative");
}

// I_nu(z) = exp(log_factor) * sum * 2^shift
struct BesselSeries {
  double log_factor = 0.0;
  double sum = 0.0;
  std::int64_t shift = 0;

  LogScaled scaled_sum() const { return LogScaled::from_parts(sum, shift); }
};

// (z/2)^nu / Gamma(nu + 1) * sum_n (z^2/4)^n / (n! (nu+1)_n), with the sum
// rescaled by 2^-800 whenever it grows past 2^800 so that z >> 700 stays finite.
inline BesselSeries bessel_series(double order, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  std::int64_t shift = 0;
  const double cap = 10000.0 + 4.0 * z;
  for (double n = 0.0;; n += 1.0) {
    const double ratio = q / ((n + 1.0) * (order + n + 1.0));
    term *= ratio;
    sum += term;
    if (ratio < 1.0 && term < sum * 0.5 * std::numeric_limits<double>::epsilon()) break;
    if (sum > 0x1p800) {
      term = std::ldexp(term, -800);
      sum = std::ldexp(sum, -800);
      shift += 800;
    }
    if (n > cap) throw ConvergenceError("bessel: Maclaurin series did not converge");
  }
  return {order * std::log(0.5 * z) - log_gamma_1p(order), sum, shift};
}

}  // namespace detail

/// ln I_nu(z); -inf where I vanishes (z == 0, nu > 0).
inline double log_bessel_i(const BesselArgument& b) {
  detail::check_bessel(b);
  if (b.arg == 0.0) return b.order == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const auto s = detail::bessel_series(b.order, b.arg);
  return s.log_factor + std::log(s.sum) + static_cast<double>(s.shift) * std::numbers::ln2;
}

/// e^{-z} I_nu(z) in log-scaled form; never underflows.
inline LogScaled bessel_i_scaled_log(const BesselArgument& b) {
  detail::check_bessel(b);
  if (b.arg == 0.0) return b.order == 0.0 ? LogScaled::one() : LogScaled::zero();
  const auto s = detail::bessel_series(b.order, b.arg);
  return LogScaled::exp(s.log_factor) * LogScaled::exp(-b.arg) * s.scaled_sum();
}

/// e^{-z} I_nu(z), in [0, 1].
inline double bessel_i_scaled(const BesselArgument& b) { return bessel_i_scaled_log(b).value(); }

/// I_nu(z) in log-scaled form.
inline LogScaled bessel_i(const BesselArgument& b) {
  detail::check_bessel(b);
  if (b.arg == 0.0) return b.order == 0.0 ? LogScaled::one() : LogScaled::zero();
  const auto s = detail::bessel_series(b.order, b.arg);
  return LogScaled::exp(s.log_factor) * s.scaled_sum();
}

/// I_{nu+1}(z) / I_nu(z) from
///   z / (2(nu+1) + z^2 / (2(nu+2) + z^2 / (2(nu+3) + ...)))
/// evaluated with the modified Lentz algorithm.
inline double bessel_ratio(double order, double arg) {
  detail::check_bessel({order, arg});
  if (arg == 0.0) return 0.0;
  constexpr double tiny = 1e-30;
  constexpr double tolerance = 1e-15;
  constexpr int max_iterations = 10000;

  const double z2 = arg * arg;
  double f = 2.0 * (order + 1.0);
  double c = f;
  double d = 0.0;
  for (int j = 2; j <= max_iterations; ++j) {
    const double b = 2.0 * (order + j);
    d = b + z2 * d;
    if (std::abs(d) < tiny) d = tiny;
    c = b + z2 / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < tolerance) return arg / f;
  }
  throw ConvergenceError("bessel_ratio: continued fraction did not converge");
}

}  // namespace nuttall
