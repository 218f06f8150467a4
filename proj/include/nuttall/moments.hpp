#pragma once

// Nuttall Q-functions
//
//   Q_{eta,mu}(x, y) = x^{(1-mu)/2} int_y^inf t^{eta+(mu-1)/2} e^{-t-x} I_{mu-1}(2 sqrt(x t)) dt
//
// evaluated three ways: the incomplete-gamma series, the inhomogeneous ladder
// in mu, and the homogeneous three-term recurrence. eta = 0 is the generalized
// Marcum Q-function.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuttall/bessel.hpp"
#include "nuttall/errors.hpp"
#include "nuttall/incgamma.hpp"
#include "nuttall/log_scaled.hpp"

namespace nuttall {

struct MomentQuery {
  double eta = 0.0;  // moment order, >= 0 (integer for the recurrences)
  double mu = 1.0;   // > 0
  double x = 0.0;    // non-centrality, >= 0
  double y = 0.0;    // lower integration limit, >= 0
};

struct SeriesOutcome {
  double value = 0.0;
  LogScaled scaled;          // same value, never overflows
  std::size_t terms_used = 0;
  double est_error = 0.0;    // estimated relative truncation error
  bool converged = false;
};

enum class SeedMethod {
  // Row eta = 0 from marcum_q at every column, column 0 of every higher row
  // from nuttall_q_series.
  marcum_row_series_column,
};

struct RecurrenceTable {
  std::size_t eta_max = 0;
  double mu_start = 1.0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major, (eta_max + 1) x n_cols
  SeedMethod seed_method = SeedMethod::marcum_row_series_column;

  double at(std::size_t eta, std::size_t col) const { return values.at(eta * n_cols + col); }
  std::span<const double> row(std::size_t eta) const {
    return std::span<const double>(values).subspan(eta * n_cols, n_cols);
  }
};

inline constexpr double kDefaultSeriesTolerance = 1e-15;
inline constexpr std::size_t kDefaultMaxTerms = 10000;

namespace detail {

inline void check_query(const MomentQuery& q) {
  require(q.eta >= 0.0 && std::isfinite(q.eta), "nuttall: eta must be non-negative");
  require(q.mu > 0.0 && std::isfinite(q.mu), "nuttall: mu must be positive");
  require(q.x >= 0.0 && std::isfinite(q.x), "nuttall: x must be non-negative");
  require(q.y >= 0.0 && std::isfinite(q.y), "nuttall: y must be non-negative");
}

inline bool is_integer(double v) { return std::floor(v) == v; }

}  // namespace detail

/// Q_{eta,mu}(x, y) = e^{-x} sum_n x^n/n! Gamma(eta+mu+n)/Gamma(mu+n) Q_{eta+mu+n}(y).
///
/// Q_{eta+mu}(y) is evaluated once and stepped forward in the shape; the
/// x^n/n! and Gamma-ratio factors are updated by one multiplication per term.
/// Summation stops once three consecutive terms fall below `tol` relative to
/// the running sum, the term peak near n = x has been passed, and the
/// geometric tail estimate is below `tol`.
inline SeriesOutcome nuttall_q_series(const MomentQuery& q, double tol = kDefaultSeriesTolerance,
                                      std::size_t max_terms = kDefaultMaxTerms) {
  detail::check_query(q);
  detail::require(tol >= 1e-15 * (1.0 - 1e-9) && tol <= 1e-6, "nuttall_q_series: tol must lie in [1e-15, 1e-6]");
  detail::require(max_terms >= 1, "nuttall_q_series: max_terms must be at least 1");

  SeriesOutcome out;
  if (q.eta == 0.0 && q.y == 0.0) {
    out.scaled = LogScaled::one();
    out.value = 1.0;
    out.terms_used = 1;
    out.converged = true;
    return out;
  }

  const double shape = q.eta + q.mu;
  const LogScaled lead_ratio = gamma_shape_ratio(q.eta, q.mu);
  double q_factor = gamma_ratio_q(shape, q.y);

  if (q.x == 0.0) {
    out.scaled = lead_ratio * q_factor;
    out.value = out.scaled.value();
    out.terms_used = 1;
    out.converged = true;
    return out;
  }

  LogScaled weight = LogScaled::one();  // x^n/n! * R_n / R_0
  LogScaled sum;
  LogScaled previous;
  int quiet_run = 0;
  double est = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < max_terms; ++n) {
    if (n > 0) {
      const double k = static_cast<double>(n);
      weight *= (q.x / k) * ((shape + k - 1.0) / (q.mu + k - 1.0));
      q_factor = q_forward_step(q_factor, shape + k - 1.0, q.y);
    }
    const LogScaled term = weight * q_factor;
    sum += term;
    out.terms_used = n + 1;

    const double rel = sum.is_zero() ? 0.0 : (term / sum).value();
    quiet_run = rel < tol ? quiet_run + 1 : 0;
    double rho = 0.0;
    if (n > 0 && !term.is_zero()) {
      rho = previous.is_zero() ? std::numeric_limits<double>::infinity() : (term / previous).value();
    }
    previous = term;

    if (quiet_run >= 3 && static_cast<double>(n) > q.x && rho < 1.0) {
      est = rel * rho / (1.0 - rho);
      if (est <= tol) {
        out.converged = true;
        break;
      }
    }
  }

  out.est_error = est;
  out.scaled = LogScaled::exp(-q.x) * lead_ratio * sum;
  out.value = out.scaled.value();
  if (q.eta == 0.0 && out.value > 1.0) {
    out.value = 1.0;
    out.scaled = LogScaled::one();
  }
  return out;
}

namespace detail {

inline double series_or_throw(const MomentQuery& q) {
  const auto s = nuttall_q_series(q);
  if (!s.converged) {
    throw ConvergenceError("nuttall_q_series did not converge (eta=" + std::to_string(q.eta) +
                           ", mu=" + std::to_string(q.mu) + ", x=" + std::to_string(q.x) +
                           ", y=" + std::to_string(q.y) + ")");
  }
  return s.value;
}

inline LogScaled series_scaled_or_throw(const MomentQuery& q) {
  const auto s = nuttall_q_series(q);
  if (!s.converged) throw ConvergenceError("nuttall_q_series did not converge");
  return s.scaled;
}

}  // namespace detail

/// Generalized Marcum Q-function Q_mu(x, y) = Q_{0,mu}(x, y).
inline double marcum_q(double mu, double x, double y) { return detail::series_or_throw({0.0, mu, x, y}); }

/// Complement P_mu(x, y) = 1 - Q_mu(x, y).
inline double marcum_p(double mu, double x, double y) { return 1.0 - marcum_q(mu, x, y); }

/// Forcing term of the ladder in mu,
///   (y/x)^{mu/2} y^eta e^{-x-y} I_mu(2 sqrt(x y))
///     = (y/x)^{mu/2} y^eta e^{-(sqrt x - sqrt y)^2} e^{-z} I_mu(z),
/// formed from the scaled Bessel function. At x = 0 the limit
/// y^{eta+mu} e^{-y} / Gamma(mu + 1) is returned.
inline LogScaled inhomogeneous_term(double eta, double mu, double x, double y) {
  detail::check_query({eta, mu, x, y});
  if (y == 0.0) return LogScaled::zero();
  if (x == 0.0) {
    return LogScaled::exp((eta + mu) * std::log(y) - y - log_gamma_1p(mu));
  }
  const double gap = std::sqrt(x) - std::sqrt(y);
  const double log_prefix = 0.5 * mu * (std::log(y) - std::log(x)) + eta * std::log(y) - gap * gap;
  return LogScaled::exp(log_prefix) * bessel_i_scaled_log({mu, 2.0 * std::sqrt(x * y)});
}

/// Table of Q_{e, mu_start + m}(x, y), e = 0..eta_max, m = 0..n_cols-1, filled
/// with Q_{e,mu+1} = Q_{e,mu} + e Q_{e-1,mu+1} + forcing term. Every term on
/// the right is positive, so the forward direction is stable.
inline RecurrenceTable nuttall_q_ladder(std::size_t eta_max, double mu_start, std::size_t n_cols, double x,
                                        double y) {
  detail::require(x > 0.0 && std::isfinite(x), "nuttall_q_ladder: x must be positive; use the series at x = 0");
  detail::require(y >= 0.0 && std::isfinite(y), "nuttall_q_ladder: y must be non-negative");
  detail::require(mu_start > 0.0 && std::isfinite(mu_start), "nuttall_q_ladder: mu_start must be positive");
  detail::require(n_cols >= 1, "nuttall_q_ladder: n_cols must be at least 1");

  RecurrenceTable table;
  table.eta_max = eta_max;
  table.mu_start = mu_start;
  table.n_cols = n_cols;
  table.values.assign((eta_max + 1) * n_cols, 0.0);
  auto cell = [&](std::size_t e, std::size_t m) -> double& { return table.values[e * n_cols + m]; };

  for (std::size_t m = 0; m < n_cols; ++m) cell(0, m) = marcum_q(mu_start + static_cast<double>(m), x, y);

  for (std::size_t e = 1; e <= eta_max; ++e) {
    const double eta = static_cast<double>(e);
    cell(e, 0) = detail::series_or_throw({eta, mu_start, x, y});
    for (std::size_t m = 0; m + 1 < n_cols; ++m) {
      const double mu = mu_start + static_cast<double>(m);
      const double forcing = inhomogeneous_term(eta, mu, x, y).value();
      cell(e, m + 1) = cell(e, m) + eta * cell(e - 1, m + 1) + forcing;
    }
  }

  for (double v : table.values) {
    if (!std::isfinite(v)) throw std::range_error("nuttall_q_ladder: entry overflows double precision");
  }
  return table;
}

/// Row Q_{eta, mu_start + m}, m = 0..n_cols-1, from the row eta-1 and the two
/// seeds, by the homogeneous three-term recurrence
///   Q_{eta,mu+2} = (1 + c) Q_{eta,mu+1} - c Q_{eta,mu} + eta Q_{eta-1,mu+2} - eta c Q_{eta-1,mu+1},
///   c = sqrt(y/x) I_{mu+1}(2 sqrt(xy)) / I_mu(2 sqrt(xy)).
/// The step is applied as Q_{eta,mu+1} + eta Q_{eta-1,mu+2} + c * D with
/// D = Q_{eta,mu+1} - Q_{eta,mu} - eta Q_{eta-1,mu+1}, which is the same
/// expression regrouped.
inline std::vector<double> nuttall_q_homogeneous(std::size_t eta, std::span<const double> prev_row, double seed0,
                                                 double seed1, double x, double y, double mu_start,
                                                 std::size_t n_cols) {
  detail::require(eta >= 1, "nuttall_q_homogeneous: eta must be at least 1");
  detail::require(x > 0.0 && std::isfinite(x), "nuttall_q_homogeneous: x must be positive");
  detail::require(y >= 0.0 && std::isfinite(y), "nuttall_q_homogeneous: y must be non-negative");
  detail::require(mu_start > 0.0, "nuttall_q_homogeneous: mu_start must be positive");
  detail::require(n_cols >= 1, "nuttall_q_homogeneous: n_cols must be at least 1");
  detail::require(prev_row.size() >= n_cols, "nuttall_q_homogeneous: previous row is too short");

  std::vector<double> row(n_cols);
  row[0] = seed0;
  if (n_cols == 1) return row;
  row[1] = seed1;

  const double e = static_cast<double>(eta);
  const double z = 2.0 * std::sqrt(x * y);
  const double scale = std::sqrt(y / x);
  for (std::size_t m = 0; m + 2 < n_cols; ++m) {
    const double mu = mu_start + static_cast<double>(m);
    const double c = scale * bessel_ratio(mu, z);
    const double forcing = row[m + 1] - row[m] - e * prev_row[m + 1];
    row[m + 2] = row[m + 1] + e * prev_row[m + 2] + c * forcing;
  }
  return row;
}

/// Row-by-row homogeneous recurrence from the Marcum row up to eta_max.
/// Row 0 comes from marcum_q; each higher row is seeded with two series
/// values. Result has the same layout as nuttall_q_ladder.
inline RecurrenceTable nuttall_q_homogeneous_table(std::size_t eta_max, double mu_start, std::size_t n_cols, double x,
                                                   double y) {
  detail::require(x > 0.0 && std::isfinite(x), "nuttall_q_homogeneous: x must be positive");
  detail::require(n_cols >= 1, "nuttall_q_homogeneous: n_cols must be at least 1");
  RecurrenceTable table;
  table.eta_max = eta_max;
  table.mu_start = mu_start;
  table.n_cols = n_cols;
  table.values.reserve((eta_max + 1) * n_cols);
  for (std::size_t m = 0; m < n_cols; ++m) table.values.push_back(marcum_q(mu_start + static_cast<double>(m), x, y));

  for (std::size_t e = 1; e <= eta_max; ++e) {
    const double eta = static_cast<double>(e);
    const double seed0 = detail::series_or_throw({eta, mu_start, x, y});
    const double seed1 = n_cols > 1 ? detail::series_or_throw({eta, mu_start + 1.0, x, y}) : 0.0;
    const std::vector<double> prev(table.row(e - 1).begin(), table.row(e - 1).end());
    const auto row = nuttall_q_homogeneous(e, prev, seed0, seed1, x, y, mu_start, n_cols);
    table.values.insert(table.values.end(), row.begin(), row.end());
  }
  return table;
}

/// |1 - Q_{eta,mu+1} / (Q_{eta,mu} + eta Q_{eta-1,mu+1} + forcing)| with all
/// moments from the series. Measures the joint accuracy of the series, the
/// incomplete gamma ratios and the Bessel function. x = 0 uses the limiting
/// forcing term.
inline double consistency_deviation(const MomentQuery& q) {
  detail::check_query(q);
  detail::require(q.eta >= 1.0 && detail::is_integer(q.eta), "consistency_deviation: eta must be an integer >= 1");

  const LogScaled upper = detail::series_scaled_or_throw({q.eta, q.mu + 1.0, q.x, q.y});
  const LogScaled same = detail::series_scaled_or_throw(q);
  const LogScaled lower = detail::series_scaled_or_throw({q.eta - 1.0, q.mu + 1.0, q.x, q.y});
  const LogScaled denominator = same + lower * q.eta + inhomogeneous_term(q.eta, q.mu, q.x, q.y);
  return std::abs(1.0 - (upper / denominator).value());
}

}  // namespace nuttall
