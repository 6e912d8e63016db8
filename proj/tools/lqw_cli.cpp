// Command-line front end: simulate, sweep, fit, spectral.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqw/harness.hpp"
#include "lqw/simulate.hpp"
#include "lqw/spectral.hpp"

namespace {

using lqw::Index;

struct LoopOptions {
  std::optional<double> weight;
  std::string rule;

  double resolve(Index side) const {
    if (weight) return *weight;
    if (rule == "4overN") return 4.0 / static_cast<double>(side * side);
    throw lqw::InvalidConfig("--loop-rule must be 4overN, got '" + rule + "'");
  }
};

void add_loop_options(CLI::App* app, LoopOptions& opts) {
  auto* weight = app->add_option("--loop-weight", opts.weight, "self-loop weight l");
  auto* rule = app->add_option("--loop-rule", opts.rule, "loop weight rule (4overN)");
  weight->excludes(rule);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw lqw::IoError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lackadaisical quantum walk search on the 2D torus"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "success-probability series for one config");
  Index sim_n = 16;
  Index sim_steps = 100;
  Index sim_marked = 0;
  std::string sim_oracle = "grover";
  std::string sim_out;
  LoopOptions sim_loop;
  simulate->add_option("--n", sim_n, "grid side")->required();
  add_loop_options(simulate, sim_loop);
  simulate->add_option("--oracle", sim_oracle, "grover, skw or none");
  simulate->add_option("--steps", sim_steps, "number of steps");
  simulate->add_option("--marked", sim_marked, "marked vertex index");
  simulate->add_option("--out", sim_out, "series CSV path (stdout if omitted)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "first peak over a range of grid sides");
  Index sweep_min = 16, sweep_max = 128, sweep_stride = 1;
  std::string sweep_rule = "4overN";
  std::vector<double> sweep_list;
  std::string sweep_oracle = "grover";
  std::string sweep_out;
  unsigned sweep_threads = 0;
  sweep->add_option("--n-min", sweep_min, "smallest grid side");
  sweep->add_option("--n-max", sweep_max, "largest grid side");
  sweep->add_option("--stride", sweep_stride, "step between grid sides");
  auto* rule_opt = sweep->add_option("--loop-rule", sweep_rule, "loop weight rule (4overN)");
  sweep->add_option("--loop-list", sweep_list, "explicit loop weights")->delimiter(',')->excludes(rule_opt);
  sweep->add_option("--oracle", sweep_oracle, "grover, skw or none");
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = all cores)");
  sweep->add_option("--out", sweep_out, "sweep CSV path (stdout if omitted)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit t* = c * sqrt(N ln N) to a sweep CSV");
  std::string fit_in;
  bool fit_intercept = false;
  fit->add_option("--in", fit_in, "sweep CSV")->required();
  fit->add_flag("--intercept", fit_intercept, "also fit an intercept (diagnostic)");

  // spectral
  auto* spectral = app.add_subcommand("spectral", "abstract-search framework report");
  Index spec_n = 4;
  std::string spec_oracle = "grover";
  std::string spec_out;
  Index spec_marked = 0;
  LoopOptions spec_loop;
  spectral->add_option("--n", spec_n, "grid side (<= 16)")->required();
  add_loop_options(spectral, spec_loop);
  spectral->add_option("--oracle", spec_oracle, "grover, skw or none");
  spectral->add_option("--marked", spec_marked, "marked vertex index");
  spectral->add_option("--out", spec_out, "report path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      if (!sim_loop.weight && sim_loop.rule.empty()) sim_loop.weight = 0.0;
      lqw::WalkConfig config{lqw::GridGeometry(sim_n), sim_loop.resolve(sim_n),
                             lqw::parse_oracle(sim_oracle), sim_marked};
      const auto series = lqw::run_series(config, sim_steps);
      std::ostream* summary = &std::cout;
      if (sim_out.empty()) {
        lqw::emit_csv(series, std::cout);
        summary = &std::cerr;
      } else {
        lqw::emit_csv(series, std::filesystem::path(sim_out));
      }
      try {
        const auto peak = lqw::find_first_peak(series);
        *summary << "t_star=" << peak.t_star << '\n'
                 << "p_star=" << lqw::format_double(peak.p_star) << '\n';
      } catch (const lqw::NoPeakFound&) {
        *summary << "t_star=\np_star=\n";
      }
    } else if (*sweep) {
      lqw::SweepSpec spec;
      spec.grid_sides = lqw::side_range(sweep_min, sweep_max, sweep_stride);
      if (!sweep_list.empty()) {
        spec.loop_weights = sweep_list;
      } else if (sweep_rule != "4overN") {
        throw lqw::InvalidConfig("--loop-rule must be 4overN, got '" + sweep_rule + "'");
      }
      spec.oracle = lqw::parse_oracle(sweep_oracle);
      spec.threads = sweep_threads;
      const auto table = lqw::run_sweep(spec);
      if (sweep_out.empty()) lqw::emit_csv(table, std::cout);
      else lqw::emit_csv(table, std::filesystem::path(sweep_out));
      for (const auto& row : table) {
        if (!row.ok()) std::cerr << "warning: n=" << row.n << " l=" << row.loop_weight << ": " << row.error << '\n';
      }
    } else if (*fit) {
      const auto result = lqw::fit_runtime(lqw::read_sweep_csv(fit_in), fit_intercept);
      lqw::emit_fit(result, std::cout);
      if (fit_intercept) std::cout << "intercept=" << lqw::format_double(result.intercept) << '\n';
    } else if (*spectral) {
      if (!spec_loop.weight && spec_loop.rule.empty()) spec_loop.weight = 0.0;
      lqw::WalkConfig config{lqw::GridGeometry(spec_n), spec_loop.resolve(spec_n),
                             lqw::parse_oracle(spec_oracle), spec_marked};
      write_text(spec_out, lqw::format_report(lqw::analyze_framework(config)));
    }
  } catch (const lqw::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
