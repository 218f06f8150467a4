#pragma once

// Brute-force evaluation of the defining integral of Q_{eta,mu}(x, y). The
// improper integral is truncated around the peak of t^g e^{-(sqrt t - sqrt x)^2},
// g = eta + (mu - 1)/2, the interval is mapped onto (-1, 1) through
// t = tanh(u), and the trapezoidal rule is applied in u. This path shares no
// code with the series beyond the Bessel function and serves as the oracle for
// the other methods. Requires mu >= 1 (the Bessel order mu - 1 must be
// non-negative).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "nuttall/bessel.hpp"
#include "nuttall/errors.hpp"
#include "nuttall/log_scaled.hpp"
#include "nuttall/moments.hpp"

namespace nuttall {

struct QuadratureSpec {
  double gamma_exp = 0.0;  // eta + (mu - 1)/2
  double peak = 0.0;       // argmax of the Gaussian-like profile
  double lower = 0.0;
  double upper = 0.0;
  std::size_t nodes = 64;
};

struct QuadratureOutcome {
  double value = 0.0;
  LogScaled scaled;
  std::size_t nodes = 0;    // nodes of the accepted rule
  double est_error = 0.0;   // relative change over the last doubling
  bool converged = false;
};

inline constexpr std::size_t kMinQuadratureNodes = 16;
inline constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 20;
inline constexpr double kQuadratureTolerance = 1e-12;

namespace detail {

inline void check_quadrature_query(const MomentQuery& q) {
  check_query(q);
  require(q.mu >= 1.0, "quadrature: mu must be >= 1");
}

// ln of the scaled integrand; -inf where it vanishes.
inline double log_integrand(const MomentQuery& q, double t) {
  const double g = q.eta + 0.5 * (q.mu - 1.0);
  if (q.x == 0.0) {
    // x^{(1-mu)/2} I_{mu-1}(2 sqrt(xt)) -> t^{(mu-1)/2} / Gamma(mu)
    const double power = q.eta + q.mu - 1.0;
    const double log_t = power == 0.0 ? 0.0 : (t == 0.0 ? -std::numeric_limits<double>::infinity() : power * std::log(t));
    return log_t - t - log_gamma(q.mu);
  }
  double log_t = 0.0;
  if (g != 0.0) log_t = t == 0.0 ? -std::numeric_limits<double>::infinity() : g * std::log(t);
  const double gap = std::sqrt(t) - std::sqrt(q.x);
  const double bessel = bessel_i_scaled_log({q.mu - 1.0, 2.0 * std::sqrt(q.x * t)}).log_magnitude();
  return 0.5 * (1.0 - q.mu) * std::log(q.x) + log_t - gap * gap + bessel;
}

inline double log_profile(double g, double x, double t) {
  const double gap = std::sqrt(t) - std::sqrt(x);
  if (g == 0.0) return -gap * gap;
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  return g * std::log(t) - gap * gap;
}

}  // namespace detail

/// x^{(1-mu)/2} t^{eta+(mu-1)/2} e^{-(sqrt t - sqrt x)^2} e^{-z} I_{mu-1}(z),
/// z = 2 sqrt(x t); equal to the integrand of the defining integral.
inline double integrand_scaled(const MomentQuery& q, double t) {
  detail::check_quadrature_query(q);
  detail::require(t >= q.y, "integrand_scaled: t must not lie below y");
  return std::exp(detail::log_integrand(q, t));
}

/// Interval [a, b] = [max(y, peak - w), peak + w]. w is doubled until, at both
/// ends, the profile t^g e^{-(sqrt t - sqrt x)^2} and the integrand itself are
/// below eps times their maxima (the profile alone underestimates the tail
/// when x is small).
inline QuadratureSpec truncation_bounds(const MomentQuery& q, double eps = 1e-16) {
  detail::check_quadrature_query(q);
  detail::require(eps >= 1e-18 && eps <= 1e-8, "truncation_bounds: eps must lie in [1e-18, 1e-8]");

  QuadratureSpec spec;
  spec.gamma_exp = q.eta + 0.5 * (q.mu - 1.0);
  const double rx = std::sqrt(q.x);
  const double rs = rx + std::sqrt(q.x + 4.0 * spec.gamma_exp);
  spec.peak = 0.25 * rs * rs;

  const double log_eps = std::log(eps);
  const double anchor = std::max(spec.peak, q.y);
  const double profile_cut = detail::log_profile(spec.gamma_exp, q.x, anchor) + log_eps;

  double w = 1.0 + std::sqrt(std::max(spec.peak, 1.0));
  for (int attempt = 0; attempt < 200; ++attempt, w *= 2.0) {
    const double a = std::max(q.y, spec.peak - w);
    const double b = spec.peak + w;
    if (b <= a) continue;

    double peak_log = -std::numeric_limits<double>::infinity();
    constexpr int scan = 64;
    for (int i = 0; i <= scan; ++i) {
      peak_log = std::max(peak_log, detail::log_integrand(q, a + (b - a) * i / scan));
    }
    const double integrand_cut = peak_log + log_eps;

    const bool right_ok =
        detail::log_profile(spec.gamma_exp, q.x, b) < profile_cut && detail::log_integrand(q, b) < integrand_cut;
    const bool left_ok = a == q.y || (detail::log_profile(spec.gamma_exp, q.x, a) < profile_cut &&
                                      detail::log_integrand(q, a) < integrand_cut);
    if (right_ok && left_ok) {
      spec.lower = a;
      spec.upper = b;
      return spec;
    }
  }
  throw ConvergenceError("truncation_bounds: no finite interval found");
}

namespace detail {

// One trapezoidal sum with `nodes` equispaced u in [-U, U], tanh(U) = 1 - 1e-15.
// The map t = a + (b - a) sigma(2u) is the tanh substitution written with the
// logistic function so that t - a and b - t stay accurate near the ends.
inline LogScaled tanh_rule_sum(const MomentQuery& q, const QuadratureSpec& spec, double log_reference) {
  const double a = spec.lower;
  const double b = spec.upper;
  const double width = b - a;
  const double u_max = std::atanh(1.0 - 1e-15);
  const auto n = spec.nodes;
  const double h = 2.0 * u_max / static_cast<double>(n - 1);

  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = -u_max + h * static_cast<double>(i);
    const double e = std::exp(-2.0 * std::abs(u));
    const double small = e / (1.0 + e);   // sigma(-2|u|)
    const double large = 1.0 / (1.0 + e);  // sigma(2|u|)
    double t = u < 0.0 ? a + width * small : b - width * small;
    t = std::clamp(t, a, b);
    const double jacobian = 2.0 * width * small * large;
    double w = h * jacobian;
    if (i == 0 || i + 1 == n) w *= 0.5;
    const double log_f = log_integrand(q, t);
    if (log_f == -std::numeric_limits<double>::infinity()) continue;
    sum.add(w * std::exp(log_f - log_reference));
  }
  return LogScaled::exp(log_reference) * sum.value();
}

}  // namespace detail

/// Integral over [spec.lower, spec.upper] with the tanh rule, starting from
/// spec.nodes and doubling until two successive results agree to
/// kQuadratureTolerance (relative). Gives up at kMaxQuadratureNodes.
inline QuadratureOutcome tanh_rule_integrate(const MomentQuery& q, const QuadratureSpec& spec) {
  detail::check_quadrature_query(q);
  detail::require(spec.nodes >= kMinQuadratureNodes, "tanh_rule_integrate: at least 16 nodes required");
  detail::require(spec.lower >= q.y && spec.upper >= spec.lower, "tanh_rule_integrate: invalid interval");

  QuadratureOutcome out;
  if (spec.upper == spec.lower) {
    out.nodes = spec.nodes;
    out.converged = true;
    return out;
  }

  // Scale every node by the largest log-integrand on a coarse scan so that
  // values near 1e300 and beyond stay representable.
  double log_reference = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 256; ++i) {
    log_reference = std::max(
        log_reference, detail::log_integrand(q, spec.lower + (spec.upper - spec.lower) * i / 256.0));
  }
  if (!std::isfinite(log_reference)) log_reference = 0.0;

  QuadratureSpec current = spec;
  LogScaled previous = detail::tanh_rule_sum(q, current, log_reference);
  while (current.nodes < kMaxQuadratureNodes) {
    current.nodes *= 2;
    const LogScaled next = detail::tanh_rule_sum(q, current, log_reference);
    const double change = next.is_zero() ? 0.0 : std::abs(((next - previous) / next).value());
    out.scaled = next;
    out.value = next.value();
    out.nodes = current.nodes;
    out.est_error = change;
    if (change <= kQuadratureTolerance) {
      out.converged = true;
      return out;
    }
    previous = next;
  }
  return out;
}

/// truncation_bounds + tanh_rule_integrate with default settings.
inline QuadratureOutcome nuttall_q_quadrature(const MomentQuery& q, double eps = 1e-16) {
  return tanh_rule_integrate(q, truncation_bounds(q, eps));
}

}  // namespace nuttall
