#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "nuttall/errors.hpp"

namespace nuttall {

/// Natural log of Gamma(x) for x > 0. Reentrant (glibc's std::lgamma writes
/// the global `signgam`).
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/// ln Gamma(1 + a) for a > -1 without forming 1 + a, which would cost the
/// low bits of a tiny a.
inline double log_gamma_1p(double a) {
  if (std::abs(a) >= 0.5) return log_gamma(1.0 + a);
  // -ln(1+a) + a (1 - gamma_E) + sum_k (-1)^k (zeta(k) - 1) a^k / k
  static constexpr double zeta_minus_one[] = {
      6.4493406684822644e-1, 2.0205690315959429e-1, 8.2323233711138192e-2,
      3.6927755143369926e-2, 1.734306198444914e-2, 8.3492773819228268e-3,
      4.0773561979443394e-3, 2.0083928260822144e-3, 9.9457512781808534e-4,
      4.9418860411946456e-4, 2.460865533080483e-4, 1.2271334757848915e-4,
      6.1248135058704829e-5, 3.0588236307020494e-5, 1.5282259408651872e-5,
      7.6371976378997623e-6, 3.8172932649998399e-6, 1.9082127165539389e-6,
      9.5396203387279611e-7, 4.7693298678780646e-7, 2.3845050272773299e-7,
      1.1921992596531107e-7, 5.960818905125948e-8, 2.980350351465228e-8,
      1.4901554828365041e-8, 7.4507117898354295e-9, 3.7253340247884571e-9,
      1.862659723513049e-9, 9.3132743241966818e-10, 4.6566290650337841e-10,
  };
  double power = -a;
  double sum = 0.0;
  for (int k = 2; k < 32; ++k) {
    power *= -a;
    sum += zeta_minus_one[k - 2] * power / k;
  }
  return -std::log1p(a) + a * (1.0 - std::numbers::egamma) + sum;
}

/// A real number held as sign * mantissa * 2^exponent with a 64-bit binary
/// exponent, so products of factors like Gamma(130)/Gamma(30) or e^{2000}
/// never overflow. Multiplication and division are exact up to one rounding
/// of the mantissa; the (sign, log|v|) view is available through sign() and
/// log_magnitude().
class LogScaled {
 public:
  constexpr LogScaled() = default;

  static LogScaled zero() { return {}; }
  static LogScaled one() { return from_value(1.0); }

  static LogScaled from_value(double v) {
    LogScaled r;
    r.assign(v, 0);
    return r;
  }

  /// sign * e^{log_magnitude}. sign == 0 gives zero.
  static LogScaled from_log(int sign, double log_magnitude) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return {};
    if (std::isnan(log_magnitude)) return from_value(std::numeric_limits<double>::quiet_NaN());
    if (std::abs(log_magnitude) < 700.0) {
      return from_value(sign < 0 ? -std::exp(log_magnitude) : std::exp(log_magnitude));
    }
    // Cody-Waite split of ln 2 keeps the reduced argument accurate.
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    const double k = std::floor(log_magnitude / 0.6931471805599453);
    const double r = (log_magnitude - k * ln2_hi) - k * ln2_lo;
    LogScaled out;
    out.assign(sign < 0 ? -std::exp(r) : std::exp(r), static_cast<std::int64_t>(k));
    return out;
  }

  /// e^{arg}
  static LogScaled exp(double arg) { return from_log(1, arg); }

  /// mantissa * 2^exponent
  static LogScaled from_parts(double mantissa, std::int64_t exponent) {
    LogScaled out;
    out.assign(mantissa, exponent);
    return out;
  }

  int sign() const { return mantissa_ > 0 ? 1 : (mantissa_ < 0 ? -1 : 0); }
  bool is_zero() const { return mantissa_ == 0.0; }

  /// log|v|; -inf for zero.
  double log_magnitude() const {
    if (mantissa_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa_)) + static_cast<double>(exponent_) * 0.6931471805599453;
  }

  /// Materialize as a double; overflows to +-inf or underflows to 0 when out
  /// of range.
  double value() const {
    if (mantissa_ == 0.0) return 0.0;
    constexpr std::int64_t cap = 4096;
    const auto e = std::clamp<std::int64_t>(exponent_, -cap, cap);
    return std::ldexp(mantissa_, static_cast<int>(e));
  }

  /// Whether value() is a finite, non-subnormal double.
  bool representable() const {
    if (mantissa_ == 0.0) return true;
    return exponent_ <= std::numeric_limits<double>::max_exponent &&
           exponent_ >= std::numeric_limits<double>::min_exponent;
  }

  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  LogScaled operator-() const {
    LogScaled r = *this;
    r.mantissa_ = -r.mantissa_;
    return r;
  }

  LogScaled& operator*=(const LogScaled& o) {
    assign(mantissa_ * o.mantissa_, exponent_ + o.exponent_);
    return *this;
  }
  LogScaled& operator/=(const LogScaled& o) {
    if (o.mantissa_ == 0.0) {
      assign(mantissa_ / 0.0, exponent_);
      return *this;
    }
    assign(mantissa_ / o.mantissa_, exponent_ - o.exponent_);
    return *this;
  }
  LogScaled& operator+=(const LogScaled& o) {
    if (o.mantissa_ == 0.0) return *this;
    if (mantissa_ == 0.0) {
      *this = o;
      return *this;
    }
    const std::int64_t top = std::max(exponent_, o.exponent_);
    assign(shifted(mantissa_, exponent_ - top) + shifted(o.mantissa_, o.exponent_ - top), top);
    return *this;
  }
  LogScaled& operator-=(const LogScaled& o) { return *this += -o; }
  LogScaled& operator*=(double v) { return *this *= from_value(v); }

  friend LogScaled operator*(LogScaled a, const LogScaled& b) { return a *= b; }
  friend LogScaled operator/(LogScaled a, const LogScaled& b) { return a /= b; }
  friend LogScaled operator+(LogScaled a, const LogScaled& b) { return a += b; }
  friend LogScaled operator-(LogScaled a, const LogScaled& b) { return a -= b; }
  friend LogScaled operator*(LogScaled a, double b) { return a *= b; }

  /// Magnitude comparison of |a| against |b|.
  friend bool abs_less(const LogScaled& a, const LogScaled& b) {
    if (a.mantissa_ == 0.0) return b.mantissa_ != 0.0;
    if (b.mantissa_ == 0.0) return false;
    if (a.exponent_ != b.exponent_) return a.exponent_ < b.exponent_;
    return std::abs(a.mantissa_) < std::abs(b.mantissa_);
  }

 private:
  static double shifted(double m, std::int64_t by) {
    if (by < -1100) return 0.0;
    return std::ldexp(m, static_cast<int>(by));
  }

  void assign(double m, std::int64_t e) {
    if (m == 0.0 || !std::isfinite(m)) {
      mantissa_ = m;
      exponent_ = 0;
      return;
    }
    int k = 0;
    mantissa_ = std::frexp(m, &k);
    exponent_ = e + k;
  }

  double mantissa_ = 0.0;  // |m| in [0.5, 1), or 0
  std::int64_t exponent_ = 0;
};

/// Neumaier-compensated running sum with a fixed summation order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace nuttall
