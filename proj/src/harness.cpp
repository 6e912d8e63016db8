#include "lqw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace lqw {

void SweepSpec::validate() const {
  if (grid_sides.empty()) throw InvalidConfig("sweep needs at least one grid side");
  for (Index n : grid_sides) {
    if (n < 2) throw InvalidConfig("grid side must be >= 2, got " + std::to_string(n));
  }
  if (const auto* list = std::get_if<std::vector<double>>(&loop_weights)) {
    if (list->empty()) throw InvalidConfig("loop weight list is empty");
    for (double l : *list) {
      if (!(l >= 0.0) || !std::isfinite(l)) {
        throw InvalidConfig("loop weight must be finite and >= 0");
      }
    }
  }
}

std::vector<double> SweepSpec::weights_for(Index side) const {
  if (const auto* list = std::get_if<std::vector<double>>(&loop_weights)) return *list;
  return {4.0 / static_cast<double>(side * side)};
}

std::vector<Index> side_range(Index min, Index max, Index stride) {
  if (stride < 1) throw InvalidConfig("stride must be >= 1");
  if (min < 2 || max < min) {
    throw InvalidConfig("invalid side range [" + std::to_string(min) + ", " +
                        std::to_string(max) + "]");
  }
  std::vector<Index> sides;
  for (Index n = min; n <= max; n += stride) sides.push_back(n);
  return sides;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  for (Index n : spec.grid_sides) {
    for (double l : spec.weights_for(n)) {
      table.push_back({n, n * n, l, std::nullopt, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < table.size(); i = next++) {
      SweepRow& row = table[i];
      try {
        WalkConfig config{GridGeometry(row.n), row.loop_weight, spec.oracle, 0};
        row.peak = auto_peak(config, spec.rule);
      } catch (const Error& e) {
        row.error = e.kind();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(table.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  return table;
}

FitResult fit_line(std::span<const double> xs, std::span<const double> ys,
                   bool with_intercept) {
  if (xs.size() != ys.size()) throw InsufficientData("x and y lengths differ");
  if (xs.size() < 2) {
    throw InsufficientData("fit needs >= 2 points, got " + std::to_string(xs.size()));
  }
  const auto count = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double mx = sx / count, my = sy / count;
  double cxx = 0, cxy = 0, cyy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cxx += (xs[i] - mx) * (xs[i] - mx);
    cxy += (xs[i] - mx) * (ys[i] - my);
    cyy += (ys[i] - my) * (ys[i] - my);
  }

  FitResult fit;
  fit.points = static_cast<Index>(xs.size());
  if (with_intercept) {
    if (!(cxx > 0)) throw InsufficientData("all abscissae coincide");
    fit.c = cxy / cxx;
    fit.intercept = my - fit.c * mx;
  } else {
    fit.c = sxy / sxx;
  }
  fit.correlation = (cxx > 0 && cyy > 0) ? std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0) : 0.0;
  return fit;
}

FitResult fit_runtime(const SweepTable& table, bool with_intercept) {
  std::vector<double> xs, ys;
  for (const SweepRow& row : table) {
    if (!row.ok()) continue;
    const double n = static_cast<double>(row.vertices);
    xs.push_back(std::sqrt(n * std::log(n)));
    ys.push_back(static_cast<double>(row.peak->t_star));
  }
  if (xs.size() < 2) {
    throw InsufficientData("runtime fit needs >= 2 successful rows, got " +
                           std::to_string(xs.size()));
  }
  return fit_line(xs, ys, with_intercept);
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw ParseError("cannot format double");
  return {buf, end};
}

double parse_double(std::string_view text) {
  double value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

Index parse_index(std::string_view text) {
  Index value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  for (std::size_t start = 0;;) {
    const std::size_t pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename Value>
void write_file(const std::filesystem::path& path, const Value& value) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit_csv(value, out);
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

constexpr std::string_view kSweepHeader = "n,N,loop_weight,t_star,p_star";
constexpr std::string_view kSeriesHeader = "t,success_probability";

}  // namespace

void emit_csv(const SweepTable& table, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const SweepRow& row : table) {
    out << row.n << ',' << row.vertices << ',' << format_double(row.loop_weight) << ',';
    if (row.ok()) out << row.peak->t_star << ',' << format_double(row.peak->p_star);
    else out << ',';
    out << '\n';
  }
}

void emit_csv(const SweepTable& table, const std::filesystem::path& path) {
  write_file(path, table);
}

void emit_csv(const SuccessSeries& series, std::ostream& out) {
  out << kSeriesHeader << '\n';
  for (std::size_t t = 0; t < series.probabilities.size(); ++t) {
    out << t << ',' << format_double(series.probabilities[t]) << '\n';
  }
}

void emit_csv(const SuccessSeries& series, const std::filesystem::path& path) {
  write_file(path, series);
}

void emit_fit(const FitResult& fit, std::ostream& out) {
  out << "c=" << format_double(fit.c) << '\n'
      << "correlation=" << format_double(fit.correlation) << '\n';
}

SweepTable parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ParseError("expected sweep header '" + std::string(kSweepHeader) + "'");
  }
  SweepTable table;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 5 fields");
    }
    SweepRow row;
    row.n = parse_index(f[0]);
    row.vertices = parse_index(f[1]);
    row.loop_weight = parse_double(f[2]);
    if (f[3].empty() && f[4].empty()) {
      row.error = "failed";
    } else {
      row.peak = PeakResult{parse_index(f[3]), parse_double(f[4])};
    }
    table.push_back(std::move(row));
  }
  return table;
}

SweepTable read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_sweep_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_report(const FrameworkReport<double>& report) {
  std::ostringstream out;
  out << "fits=" << (report.fits ? "true" : "false") << '\n'
      << "projector_rank=" << report.projector_rank << '\n'
      << "plus_one_multiplicity=" << report.plus_one_multiplicity << '\n'
      << "tolerance=" << format_double(report.tolerance) << '\n';
  const auto optional_line = [&](std::string_view key, const std::optional<double>& v) {
    if (v) out << key << '=' << format_double(*v) << '\n';
  };
  optional_line("alpha", report.alpha);
  optional_line("runtime_estimate", report.runtime_estimate);
  optional_line("overlap_start", report.overlap_start);
  optional_line("overlap_good", report.overlap_good);
  return out.str();
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value, got '" + line + "'");
    values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return values;
}

}  // namespace lqw
