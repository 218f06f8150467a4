#pragma once

// Reference evaluations used only by the tests. They follow different
// numerical routes from the library (long double, explicit per-term gamma
// evaluations, closed forms) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace oracle {

/// I_nu(z) summed term by term, each term from lgammal: (z/2)^{2n+nu} / (n! Gamma(nu+n+1)).
inline long double bessel_i(long double nu, long double z, std::size_t terms) {
  if (z == 0.0L) return nu == 0.0L ? 1.0L : 0.0L;
  long double sum = 0.0L;
  const long double lh = std::log(z / 2.0L);
  for (std::size_t n = 0; n < terms; ++n) {
    const long double k = static_cast<long double>(n);
    sum += std::exp((2.0L * k + nu) * lh - std::lgamma(k + 1.0L) - std::lgamma(nu + k + 1.0L));
  }
  return sum;
}

/// bessel_i with enough terms that doubling the count changes nothing.
inline long double bessel_i(long double nu, long double z) {
  std::size_t terms = 16;
  long double prev = bessel_i(nu, z, terms);
  for (;;) {
    terms *= 2;
    const long double next = bessel_i(nu, z, terms);
    if (next == prev) return next;
    prev = next;
  }
}

/// Q_n(y) for integer n >= 1: e^{-y} sum_{k<n} y^k / k!.
inline long double incgamma_q_integer(int n, long double y) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < n; ++k) {
    term *= y / k;
    sum += term;
  }
  return std::exp(-y) * sum;
}

/// Q_{n+1/2}(y) = erfc(sqrt y) + e^{-y} sum_{k=0}^{n-1} y^{k+1/2} / Gamma(k + 3/2).
inline long double incgamma_q_half_integer(int n, long double y) {
  long double sum = std::erfc(std::sqrt(y));
  long double term = std::exp(-y) * std::sqrt(y) / std::tgamma(1.5L);
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= y / (k + 1.5L);
  }
  return sum;
}

/// base (base+1) ... (base+k-1)
inline long double rising_product(long double base, int k) {
  long double p = 1.0L;
  for (int j = 0; j < k; ++j) p *= base + j;
  return p;
}

/// Gamma density y^{a-1} e^{-y} / Gamma(a) = -dQ_a/dy.
inline long double gamma_density(long double a, long double y) {
  return std::exp((a - 1.0L) * std::log(y) - y - std::lgamma(a));
}

/// x^{(1-mu)/2} t^{eta+(mu-1)/2} e^{-t-x} I_{mu-1}(2 sqrt(x t)) = -dQ_{eta,mu}(x,t)/dt.
inline long double nuttall_integrand(long double eta, long double mu, long double x, long double t) {
  return std::pow(x, (1.0L - mu) / 2.0L) * std::pow(t, eta + (mu - 1.0L) / 2.0L) * std::exp(-t - x) *
         bessel_i(mu - 1.0L, 2.0L * std::sqrt(x * t));
}

/// Step check for a quantity that must fall from prev to next by at least
/// min_drop. Strict where min_drop clears 16 ulp of prev; below that the two
/// doubles may legitimately coincide, so only a rise beyond rounding fails.
inline bool falls(double prev, double next, long double min_drop) {
  constexpr double noise = 16.0 * std::numeric_limits<double>::epsilon();
  if (min_drop > noise * std::abs(prev)) return next < prev;
  return next <= prev + noise * std::abs(prev);
}

inline double rel(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace oracle
