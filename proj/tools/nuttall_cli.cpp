// nuttall: evaluate, cross-check and tabulate Nuttall Q-functions.

#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace cli = nuttall::cli;

int main(int argc, char** argv) {
  CLI::App app{"Nuttall Q-function evaluator"};
  app.require_subcommand(1);

  std::string format = "text";
  double tol = nuttall::kDefaultSeriesTolerance;
  std::size_t max_terms = nuttall::kDefaultMaxTerms;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("--tol", tol, "Relative series tolerance in [1e-15, 1e-6]");
    sub->add_option("--max-terms", max_terms, "Series term cap");
  };

  nuttall::MomentQuery query;
  std::string method = "series";
  auto* eval = app.add_subcommand("eval", "Evaluate one Q_{eta,mu}(x, y)");
  eval->add_option("--eta", query.eta, "Moment order eta >= 0")->required();
  eval->add_option("--mu", query.mu, "mu > 0")->required();
  eval->add_option("--x", query.x, "Non-centrality x >= 0")->required();
  eval->add_option("--y", query.y, "Lower limit y >= 0")->required();
  eval->add_option("--method", method, "series | ladder | homogeneous | quadrature")
      ->check(CLI::IsMember({"series", "ladder", "homogeneous", "quadrature"}));
  add_common(eval);

  int which = 1;
  auto* table = app.add_subcommand("table", "Regenerate the reference tables");
  table->add_option("which", which, "1: moment values, 2: homogeneous recurrence accuracy")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  add_common(table);

  std::string eta_range = "1:50", mu_range = "1:50", x_range = "0.1:20", y_range = "0.1:20";
  std::size_t steps = 5;
  std::vector<std::string> methods{"series"};
  double threshold = 1e-12;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--eta", eta_range, "eta value or lo:hi")->capture_default_str();
    sub->add_option("--mu", mu_range, "mu value or lo:hi")->capture_default_str();
    sub->add_option("--x", x_range, "x value or lo:hi")->capture_default_str();
    sub->add_option("--y", y_range, "y value or lo:hi")->capture_default_str();
    sub->add_option("--steps", steps, "Grid points per lo:hi axis")->capture_default_str();
  };

  auto* sweep = app.add_subcommand("sweep", "Evaluate over a parameter grid");
  add_grid(sweep);
  sweep->add_option("--method", methods, "Methods (repeat or comma-separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"series", "ladder", "homogeneous", "quadrature"}));
  add_common(sweep);

  auto* selftest = app.add_subcommand("selftest", "Recurrence-consistency check of the series over a grid");
  add_grid(selftest);
  selftest->add_option("--threshold", threshold, "Maximum allowed deviation")->capture_default_str();
  add_common(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    const auto fmt = cli::parse_format(format);
    if (eval->parsed()) {
      return cli::cmd_eval(query, cli::parse_method(method), tol, max_terms, fmt, std::cout);
    }
    if (table->parsed()) return cli::cmd_table(which, fmt, std::cout);

    cli::SweepConfig cfg;
    cfg.eta = cli::parse_range(eta_range, steps);
    cfg.mu = cli::parse_range(mu_range, steps);
    cfg.x = cli::parse_range(x_range, steps);
    cfg.y = cli::parse_range(y_range, steps);
    cfg.tol = tol;
    cfg.max_terms = max_terms;
    if (sweep->parsed()) {
      cfg.methods.clear();
      for (const auto& m : methods) cfg.methods.push_back(cli::parse_method(m));
      return cli::cmd_sweep(cfg, fmt, std::cout, std::cerr);
    }
    return cli::cmd_selftest(cfg, fmt, std::cout, threshold);
  } catch (const nuttall::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitConvergence;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  }
}
