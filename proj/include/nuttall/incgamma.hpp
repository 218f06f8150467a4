#pragma once

// Normalized upper incomplete gamma function Q_a(y) = Gamma(a, y) / Gamma(a),
// its forward recurrence in the shape a, and the shape ratio
// Gamma(eta + b) / Gamma(b).

#include <cmath>
#include <limits>
#include <numbers>

#include "nuttall/errors.hpp"
#include "nuttall/log_scaled.hpp"

namespace nuttall {

struct GammaRatioQuery {
  double shape = 1.0;      // a > 0
  double lower_cut = 0.0;  // y >= 0
};

namespace detail {

inline constexpr double kIncGammaTolerance = std::numeric_limits<double>::epsilon();
inline constexpr int kIncGammaMaxIterations = 10000;
inline constexpr double kLentzTiny = 1e-300;

// lgamma(a + 1) - [(a + 1/2) ln a - a + ln(2 pi)/2]
inline double stirling_error(double a) {
  if (a > 15.0) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    const double a2 = a * a;
    return (s0 - (s1 - (s2 - (s3 - s4 / a2) / a2) / a2) / a2) / a;
  }
  // delta(k/2), k = 1 ... 30
  static constexpr double halves[] = {
        1.5342640972002735e-1, 8.1061466795327258e-2, 5.4814121051917654e-2,
        4.1340695955409294e-2, 3.3162873519936287e-2, 2.7677925684998339e-2,
        2.3746163656297496e-2, 2.0790672103765093e-2, 1.8488450532673185e-2,
        1.6644691189821192e-2, 1.5134973221917379e-2, 1.3876128823070748e-2,
        1.2810465242920227e-2, 1.189670994589177e-2, 1.1104559758206917e-2,
        1.0411265261972096e-2, 9.7994161261588033e-3, 9.2554621827127329e-3,
        8.7687001341393855e-3, 8.3305634333628713e-3, 7.9341145643140205e-3,
        7.5736754879518408e-3, 7.2445543013203832e-3, 6.9428401072095299e-3,
        6.6652470327076824e-3, 6.4089941880042071e-3, 6.1717122630394576e-3,
        5.9513701127588477e-3, 5.7462165130101157e-3, 5.5547335519628014e-3,
  };
  if (const double twice = 2.0 * a; twice == std::floor(twice)) return halves[static_cast<int>(twice) - 1];
  if (a < 1.0) {
    return log_gamma_1p(a) - (a + 0.5) * std::log(a) + a -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  // delta(a) - delta(a+1) = (a + 1/2) ln(1 + 1/a) - 1 = sum_k u^{2k} / (2k+1), u = 1/(2a+1)
  double acc = 0.0;
  for (; a <= 15.0; a += 1.0) {
    const double u2 = 1.0 / ((2.0 * a + 1.0) * (2.0 * a + 1.0));
    double power = u2;
    double step = 0.0;
    for (int k = 1; power > step * 0x1p-54; ++k) {
      step += power / (2.0 * k + 1.0);
      power *= u2;
    }
    acc += step;
  }
  return acc + stirling_error(a);
}

// a ln(a/y) + y - a, evaluated without cancellation near a == y.
inline double deviance(double a, double y) {
  if (std::abs(a - y) < 0.1 * (a + y)) {
    double v = (a - y) / (a + y);
    double s = (a - y) * v;
    double ej = 2.0 * a * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return a * std::log(a / y) + y - a;
}

}  // namespace detail

/// ln( y^a e^{-y} / Gamma(a + 1) ), -inf at y == 0. This is the prefactor of
/// both the P series and the Q continued fraction, and the increment of the
/// forward recurrence in a.
inline double log_power_exp_over_gamma(double a, double y) {
  if (y == 0.0) return -std::numeric_limits<double>::infinity();
  return -detail::deviance(a, y) - detail::stirling_error(a) -
         0.5 * std::log(2.0 * std::numbers::pi * a);
}

namespace detail {

// P_a(y) by its power series; valid for any y, fast for y < a + 1.
inline double lower_ratio_series(double a, double y) {
  double ap = a;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kIncGammaMaxIterations; ++n) {
    ap += 1.0;
    term *= y / ap;
    sum += term;
    if (term < sum * kIncGammaTolerance) {
      return sum * std::exp(log_power_exp_over_gamma(a, y));
    }
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

// Q_a(y) by the Legendre continued fraction (modified Lentz).
inline double upper_ratio_fraction(double a, double y) {
  double b = y + 1.0 - a;
  double c = 1.0 / kLentzTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kIncGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kLentzTiny) d = kLentzTiny;
    c = b + an / c;
    if (std::abs(c) < kLentzTiny) c = kLentzTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kIncGammaTolerance) {
      // y^a e^{-y} / Gamma(a) = a * y^a e^{-y} / Gamma(a + 1)
      return std::exp(log_power_exp_over_gamma(a, y) + std::log(a)) * h;
    }
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

// Q_a(y) for y <= 1.5 where P is close to 1:
//   1 - y^a / Gamma(a+1) - y^a / Gamma(a+1) * a sum_{n>=1} (-y)^n / (n! (a+n))
inline double upper_ratio_small_y(double a, double y) {
  const double log_lead = a * std::log(y) - log_gamma_1p(a);
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < kIncGammaMaxIterations; ++n) {
    term *= -y / n;
    const double add = term / (a + n);
    sum += add;
    if (std::abs(add) < std::abs(sum) * kIncGammaTolerance) break;
  }
  return -std::expm1(log_lead) - std::exp(log_lead) * a * sum;
}

}  // namespace detail

/// Q_a(y) = Gamma(a, y) / Gamma(a), in [0, 1].
inline double gamma_ratio_q(const GammaRatioQuery& q) {
  const double a = q.shape;
  const double y = q.lower_cut;
  detail::require(a > 0.0 && std::isfinite(a), "gamma_ratio_q: shape must be positive");
  detail::require(y >= 0.0, "gamma_ratio_q: lower cut must be non-negative");
  if (y == 0.0) return 1.0;
  if (std::isinf(y)) return 0.0;
  if (y < a + 1.0) {
    // 1 - P only while the subtraction loses at most one bit.
    const double p = detail::lower_ratio_series(a, y);
    if (p <= 0.5) return 1.0 - p;
    if (y <= 1.5) return detail::upper_ratio_small_y(a, y);
  }
  return detail::upper_ratio_fraction(a, y);
}

inline double gamma_ratio_q(double shape, double lower_cut) {
  return gamma_ratio_q(GammaRatioQuery{shape, lower_cut});
}

/// Q_{a+1}(y) from Q_a(y): adds y^a e^{-y} / Gamma(a + 1). Stable going up in
/// a since the increment is positive.
inline double q_forward_step(double q_value, double shape, double lower_cut) {
  if (lower_cut == 0.0) return q_value;
  return q_value + std::exp(log_power_exp_over_gamma(shape, lower_cut));
}

namespace detail {

// ln Gamma(b + eta) - ln Gamma(b) for b >= 20 via Stirling expansions of both
// terms; the large (b - 1/2) ln b pieces cancel analytically.
inline double log_gamma_shift_stirling(double eta, double b) {
  auto omega = [](double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 -
            (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - (1.0 / 1188.0 - 691.0 / 360360.0 / z2) / z2) / z2) / z2) /
                z2) /
           z;
  };
  return (b - 0.5) * std::log1p(eta / b) + eta * std::log(b + eta) - eta + omega(b + eta) - omega(b);
}

inline double log_gamma_shift(double eta, double b) {
  if (b >= 20.0) return log_gamma_shift_stirling(eta, b);
  return log_gamma(b + eta) - log_gamma(b);
}

}  // namespace detail

/// Gamma(eta + base) / Gamma(base). The integer part of eta is taken as an
/// exact rising product; a fractional remainder goes through a log-gamma
/// difference.
inline LogScaled gamma_shape_ratio(double eta, double base) {
  detail::require(base > 0.0 && std::isfinite(base), "gamma_shape_ratio: base must be positive");
  detail::require(eta >= 0.0 && std::isfinite(eta), "gamma_shape_ratio: eta must be non-negative");
  if (eta == 0.0) return LogScaled::one();

  const double whole = std::floor(eta);
  const double frac = eta - whole;
  if (whole > 4096.0) return LogScaled::exp(detail::log_gamma_shift(eta, base));

  LogScaled out = frac == 0.0 ? LogScaled::one() : LogScaled::exp(detail::log_gamma_shift(frac, base));
  // Gamma(base + frac + k) / Gamma(base + frac) = prod (base + frac + j)
  double acc = 1.0;
  const double start = base + frac;
  const auto k = static_cast<long>(whole);
  for (long j = 0; j < k; ++j) {
    acc *= start + static_cast<double>(j);
    if (acc > 1e280) {
      out *= acc;
      acc = 1.0;
    }
  }
  out *= acc;
  return out;
}

}  // namespace nuttall
