#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lqw/simulate.hpp"
#include "lqw/spectral.hpp"
#include "lqw/walk.hpp"

namespace lqw {

/// l = 4/N for every grid.
struct FourOverN {};

using LoopSchedule = std::variant<FourOverN, std::vector<double>>;

struct SweepSpec {
  std::vector<Index> grid_sides;
  LoopSchedule loop_weights = FourOverN{};
  Oracle oracle = Oracle::Grover;
  PeakRule rule{};
  /// Worker count; 0 means one per hardware thread.
  unsigned threads = 0;

  void validate() const;
  std::vector<double> weights_for(Index side) const;
};

struct SweepRow {
  Index n = 0;
  Index vertices = 0;
  double loop_weight = 0.0;
  std::optional<PeakResult> peak;
  /// Error kind for failed cells, empty otherwise.
  std::string error;

  bool ok() const noexcept { return peak.has_value(); }

  // The error kind is not part of the CSV, so it is not part of equality.
  friend bool operator==(const SweepRow& a, const SweepRow& b) {
    return a.n == b.n && a.vertices == b.vertices &&
           a.loop_weight == b.loop_weight && a.peak == b.peak;
  }
};

using SweepTable = std::vector<SweepRow>;

/// sides min, min+stride, ..., ≤ max.
std::vector<Index> side_range(Index min, Index max, Index stride = 1);

/// One auto_peak per (n, l) cell, ordered by n then l. Cells run on a
/// worker pool; a cell that throws becomes a failed row.
SweepTable run_sweep(const SweepSpec& spec);

struct FitResult {
  double c = 0.0;
  /// Zero unless fitted with an intercept.
  double intercept = 0.0;
  double correlation = 0.0;
  Index points = 0;
};

/// Least squares of y against x, through the origin unless `with_intercept`.
FitResult fit_line(std::span<const double> x, std::span<const double> y,
                   bool with_intercept = false);

/// Least squares of t* against x = √(N ln N). Through the origin unless
/// `with_intercept`, which is a diagnostic variant.
FitResult fit_runtime(const SweepTable& table, bool with_intercept = false);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

void emit_csv(const SweepTable& table, std::ostream& out);
void emit_csv(const SweepTable& table, const std::filesystem::path& path);
void emit_csv(const SuccessSeries& series, std::ostream& out);
void emit_csv(const SuccessSeries& series, const std::filesystem::path& path);
/// `c=<value>` and `correlation=<value>` lines.
void emit_fit(const FitResult& fit, std::ostream& out);

SweepTable parse_sweep_csv(std::istream& in);
SweepTable read_sweep_csv(const std::filesystem::path& path);

/// key=value lines: fits, projector_rank, plus_one_multiplicity, tolerance,
/// and alpha, runtime_estimate, overlap_start, overlap_good when fits.
std::string format_report(const FrameworkReport<double>& report);
std::map<std::string, std::string> parse_key_values(std::istream& in);

}  // namespace lqw
