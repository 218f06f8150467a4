#pragma once

// Subcommands of the `nuttall` command-line tool. Each command writes to the
// given streams and returns the process exit code, so the tests can drive
// them without spawning a process.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nuttall/nuttall.hpp"

namespace nuttall::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConvergence = 2;
inline constexpr int kExitSelfTest = 3;

enum class Method { series, ladder, homogeneous, quadrature };
enum class Format { text, csv, json };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::series: return "series";
    case Method::ladder: return "ladder";
    case Method::homogeneous: return "homogeneous";
    case Method::quadrature: return "quadrature";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "series") return Method::series;
  if (s == "ladder") return Method::ladder;
  if (s == "homogeneous") return Method::homogeneous;
  if (s == "quadrature") return Method::quadrature;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::text;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + s + "'");
}

/// 17 significant digits; round-trips every double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct EvalRecord {
  MomentQuery query;
  Method method = Method::series;
  double value = 0.0;
  double est_error = 0.0;
  std::size_t terms = 0;  // series terms, recurrence columns or quadrature nodes
  bool converged = false;
};

namespace detail {

// Ladder start in (0, 1] that reaches mu in whole steps.
inline double ladder_start(double mu) { return mu - std::ceil(mu) + 1.0; }

inline std::size_t ladder_columns(double mu, double start) {
  return static_cast<std::size_t>(std::llround(mu - start)) + 1;
}

inline std::size_t integer_eta(double eta) {
  nuttall::detail::require(nuttall::detail::is_integer(eta), "recurrence methods require an integer eta");
  return static_cast<std::size_t>(eta);
}

inline double relative_gap(double value, double reference) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(1.0 - value / reference);
}

}  // namespace detail

/// One evaluation. For the recurrences, est_error is the relative distance
/// to the series value at the same point.
inline EvalRecord evaluate(const MomentQuery& q, Method method, double tol = kDefaultSeriesTolerance,
                           std::size_t max_terms = kDefaultMaxTerms) {
  EvalRecord r;
  r.query = q;
  r.method = method;
  switch (method) {
    case Method::series: {
      const auto s = nuttall_q_series(q, tol, max_terms);
      r.value = s.value;
      r.est_error = s.est_error;
      r.terms = s.terms_used;
      r.converged = s.converged;
      break;
    }
    case Method::ladder:
    case Method::homogeneous: {
      const std::size_t eta = detail::integer_eta(q.eta);
      nuttall::detail::check_query(q);
      const double start = detail::ladder_start(q.mu);
      const std::size_t cols = detail::ladder_columns(q.mu, start);
      const auto table = method == Method::ladder ? nuttall_q_ladder(eta, start, cols, q.x, q.y)
                                                  : nuttall_q_homogeneous_table(eta, start, cols, q.x, q.y);
      r.value = table.at(eta, cols - 1);
      r.terms = cols;
      const auto s = nuttall_q_series(q, tol, max_terms);
      r.est_error = detail::relative_gap(r.value, s.value);
      r.converged = s.converged;
      break;
    }
    case Method::quadrature: {
      const auto o = nuttall_q_quadrature(q);
      r.value = o.value;
      r.est_error = o.est_error;
      r.terms = o.nodes;
      r.converged = o.converged;
      break;
    }
  }
  return r;
}

inline const char* kCsvHeader = "eta,mu,x,y,method,value,est_error,terms";

inline std::string csv_row(const EvalRecord& r) {
  std::ostringstream os;
  os << format_number(r.query.eta) << ',' << format_number(r.query.mu) << ',' << format_number(r.query.x) << ','
     << format_number(r.query.y) << ',' << to_string(r.method) << ',' << format_number(r.value) << ','
     << format_number(r.est_error) << ',' << r.terms;
  return os.str();
}

inline nlohmann::json json_record(const EvalRecord& r) {
  return {{"eta", r.query.eta},       {"mu", r.query.mu},          {"x", r.query.x},
          {"y", r.query.y},           {"method", to_string(r.method)}, {"value", r.value},
          {"est_error", r.est_error}, {"terms", r.terms},          {"converged", r.converged}};
}

inline void write_records(const std::vector<EvalRecord>& records, Format format, std::ostream& out) {
  switch (format) {
    case Format::csv:
      out << kCsvHeader << '\n';
      for (const auto& r : records) out << csv_row(r) << '\n';
      break;
    case Format::json: {
      auto arr = nlohmann::json::array();
      for (const auto& r : records) arr.push_back(json_record(r));
      out << arr.dump(2) << '\n';
      break;
    }
    case Format::text: {
      auto cell = [&](const std::string& v, int width) { out << std::left << std::setw(width) << v << "  "; };
      cell("eta", 6);
      cell("mu", 8);
      cell("x", 22);
      cell("y", 22);
      cell("method", 11);
      cell("value", 24);
      cell("est_error", 24);
      out << "terms\n";
      for (const auto& r : records) {
        cell(format_number(r.query.eta), 6);
        cell(format_number(r.query.mu), 8);
        cell(format_number(r.query.x), 22);
        cell(format_number(r.query.y), 22);
        cell(to_string(r.method), 11);
        cell(format_number(r.value), 24);
        cell(format_number(r.est_error), 24);
        out << r.terms << (r.converged ? "" : "  (not converged)") << '\n';
      }
      break;
    }
  }
}

inline int cmd_eval(const MomentQuery& q, Method method, double tol, std::size_t max_terms, Format format,
                    std::ostream& out) {
  const auto r = evaluate(q, method, tol, max_terms);
  write_records({r}, format, out);
  return r.converged ? kExitOk : kExitConvergence;
}

struct TableOneRow {
  double eta, mu, x, y;
};

inline constexpr TableOneRow kTableOneRows[] = {
    {1, 1, 0.1, 1.5}, {5, 10, 0.1, 1.5}, {50, 30, 0.1, 1.5}, {1, 1, 1.2, 5},  {5, 10, 1.2, 5},
    {50, 30, 1.2, 5}, {1, 1, 5, 10},     {5, 10, 5, 10},     {50, 30, 5, 10},
};

inline constexpr int kTableTwoDepths[] = {10, 20, 30, 40, 50, 60};

struct TableTwoRow {
  int n = 0;
  double series = 0.0;
  double recurrence = 0.0;
  double rel_error = 0.0;
};

/// Q_{2,N}(2, 3) from the homogeneous recurrence started at mu = 1, against
/// the series; rel_error = |1 - series / recurrence|.
inline std::vector<TableTwoRow> table_two() {
  constexpr double x = 2.0;
  constexpr double y = 3.0;
  const auto table = nuttall_q_homogeneous_table(2, 1.0, 60, x, y);
  std::vector<TableTwoRow> rows;
  for (int n : kTableTwoDepths) {
    TableTwoRow r;
    r.n = n;
    r.recurrence = table.at(2, static_cast<std::size_t>(n - 1));
    r.series = nuttall::detail::series_or_throw({2.0, static_cast<double>(n), x, y});
    r.rel_error = std::abs(1.0 - r.series / r.recurrence);
    rows.push_back(r);
  }
  return rows;
}

inline int cmd_table(int which, Format format, std::ostream& out) {
  if (which == 1) {
    std::vector<EvalRecord> records;
    bool ok = true;
    for (const auto& row : kTableOneRows) {
      records.push_back(evaluate({row.eta, row.mu, row.x, row.y}, Method::series));
      ok = ok && records.back().converged;
    }
    write_records(records, format, out);
    return ok ? kExitOk : kExitConvergence;
  }
  if (which != 2) throw std::invalid_argument("table must be 1 or 2");

  const auto rows = table_two();
  switch (format) {
    case Format::csv:
      out << "N,series,recurrence,rel_error\n";
      for (const auto& r : rows) {
        out << r.n << ',' << format_number(r.series) << ',' << format_number(r.recurrence) << ','
            << format_number(r.rel_error) << '\n';
      }
      break;
    case Format::json: {
      auto arr = nlohmann::json::array();
      for (const auto& r : rows) {
        arr.push_back({{"N", r.n}, {"series", r.series}, {"recurrence", r.recurrence}, {"rel_error", r.rel_error}});
      }
      out << arr.dump(2) << '\n';
      break;
    }
    case Format::text:
      out << std::left << std::setw(6) << "N" << std::setw(26) << "series" << std::setw(26) << "recurrence"
          << "rel_error\n";
      for (const auto& r : rows) {
        out << std::left << std::setw(6) << r.n << std::setw(26) << format_number(r.series) << std::setw(26)
            << format_number(r.recurrence) << format_number(r.rel_error) << '\n';
      }
      break;
  }
  return kExitOk;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 1;

  double at(std::size_t i) const {
    if (steps == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

/// "v" or "lo:hi"
inline Range parse_range(const std::string& text, std::size_t steps) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("malformed range '" + text + "'");
    return v;
  };
  Range r;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    r.lo = r.hi = number(text);
    r.steps = 1;
    return r;
  }
  r.lo = number(text.substr(0, colon));
  r.hi = number(text.substr(colon + 1));
  r.steps = steps;
  return r;
}

struct SweepConfig {
  Range eta{1.0, 50.0, 5};
  Range mu{1.0, 50.0, 5};
  Range x{0.1, 20.0, 5};
  Range y{0.1, 20.0, 5};
  std::vector<Method> methods{Method::series};
  double tol = kDefaultSeriesTolerance;
  std::size_t max_terms = kDefaultMaxTerms;
};

inline void validate(const SweepConfig& cfg) {
  for (const Range* r : {&cfg.eta, &cfg.mu, &cfg.x, &cfg.y}) {
    if (!(r->lo <= r->hi)) throw std::invalid_argument("range lower bound exceeds upper bound");
    if (r->steps < 1) throw std::invalid_argument("range needs at least one step");
  }
  if (cfg.methods.empty()) throw std::invalid_argument("at least one method is required");
}

inline bool needs_integer_eta(const SweepConfig& cfg) {
  return std::any_of(cfg.methods.begin(), cfg.methods.end(),
                     [](Method m) { return m == Method::ladder || m == Method::homogeneous; });
}

/// Grid points in eta-major order. eta is rounded to the nearest integer when
/// `integer_eta` is set.
inline std::vector<MomentQuery> grid(const SweepConfig& cfg, bool integer_eta) {
  std::vector<MomentQuery> points;
  for (std::size_t i = 0; i < cfg.eta.steps; ++i) {
    const double eta = integer_eta ? std::round(cfg.eta.at(i)) : cfg.eta.at(i);
    for (std::size_t j = 0; j < cfg.mu.steps; ++j)
      for (std::size_t k = 0; k < cfg.x.steps; ++k)
        for (std::size_t l = 0; l < cfg.y.steps; ++l) points.push_back({eta, cfg.mu.at(j), cfg.x.at(k), cfg.y.at(l)});
  }
  return points;
}

inline int cmd_sweep(const SweepConfig& cfg, Format format, std::ostream& out, std::ostream& err) {
  validate(cfg);
  std::vector<EvalRecord> records;
  int failures = 0;
  for (const auto& q : grid(cfg, needs_integer_eta(cfg))) {
    for (Method m : cfg.methods) {
      const bool recurrence = m == Method::ladder || m == Method::homogeneous;
      if (recurrence && q.x == 0.0) {
        err << "skip: " << to_string(m) << " undefined at x = 0 (eta=" << format_number(q.eta)
            << ", mu=" << format_number(q.mu) << ", y=" << format_number(q.y) << ")\n";
        continue;
      }
      if (m == Method::quadrature && q.mu < 1.0) {
        err << "skip: quadrature requires mu >= 1 (mu=" << format_number(q.mu) << ")\n";
        continue;
      }
      try {
        records.push_back(evaluate(q, m, cfg.tol, cfg.max_terms));
        if (!records.back().converged) ++failures;
      } catch (const ConvergenceError& e) {
        ++failures;
        err << "convergence failure: " << e.what() << '\n';
      }
    }
  }
  write_records(records, format, out);
  if (failures > 0) err << failures << " evaluation(s) did not converge\n";
  return failures > 0 ? kExitConvergence : kExitOk;
}

struct SelfTestSummary {
  std::size_t points = 0;
  std::size_t limit_points = 0;  // x = 0: limiting forcing term, series only
  std::size_t convergence_failures = 0;
  double max_deviation = 0.0;
  MomentQuery worst;
  double threshold = 1e-12;
  bool passed = false;
};

/// consistency_deviation over the grid. eta is rounded to an integer >= 1.
inline SelfTestSummary run_selftest(const SweepConfig& cfg, double threshold = 1e-12) {
  validate(cfg);
  SelfTestSummary s;
  s.threshold = threshold;
  for (auto q : grid(cfg, true)) {
    q.eta = std::max(q.eta, 1.0);
    ++s.points;
    if (q.x == 0.0) ++s.limit_points;
    try {
      const double d = consistency_deviation(q);
      if (!(d <= s.max_deviation)) {
        s.max_deviation = d;
        s.worst = q;
      }
    } catch (const ConvergenceError&) {
      ++s.convergence_failures;
    }
  }
  s.passed = s.convergence_failures == 0 && s.max_deviation <= threshold;
  return s;
}

inline int cmd_selftest(const SweepConfig& cfg, Format format, std::ostream& out, double threshold = 1e-12) {
  const auto s = run_selftest(cfg, threshold);
  switch (format) {
    case Format::json: {
      nlohmann::json j = {{"points", s.points},
                          {"limit_points", s.limit_points},
                          {"convergence_failures", s.convergence_failures},
                          {"max_deviation", s.max_deviation},
                          {"worst", {{"eta", s.worst.eta}, {"mu", s.worst.mu}, {"x", s.worst.x}, {"y", s.worst.y}}},
                          {"threshold", s.threshold},
                          {"passed", s.passed}};
      out << j.dump(2) << '\n';
      break;
    }
    case Format::csv:
      out << "points,limit_points,convergence_failures,max_deviation,eta,mu,x,y,threshold,passed\n";
      out << s.points << ',' << s.limit_points << ',' << s.convergence_failures << ','
          << format_number(s.max_deviation) << ',' << format_number(s.worst.eta) << ','
          << format_number(s.worst.mu) << ',' << format_number(s.worst.x) << ',' << format_number(s.worst.y) << ','
          << format_number(s.threshold) << ',' << (s.passed ? "true" : "false") << '\n';
      break;
    case Format::text:
      out << "points:               " << s.points << '\n'
          << "x=0 (series only):    " << s.limit_points << '\n'
          << "convergence failures: " << s.convergence_failures << '\n'
          << "max deviation:        " << format_number(s.max_deviation) << " at (eta=" << format_number(s.worst.eta)
          << ", mu=" << format_number(s.worst.mu) << ", x=" << format_number(s.worst.x)
          << ", y=" << format_number(s.worst.y) << ")\n"
          << "threshold:            " << format_number(s.threshold) << '\n'
          << "result:               " << (s.passed ? "PASS" : "FAIL") << '\n';
      break;
  }
  return s.passed ? kExitOk : kExitSelfTest;
}

}  // namespace nuttall::cli
