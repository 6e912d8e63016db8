#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lqw/errors.hpp"
#include "lqw/walk.hpp"

namespace lqw {

struct SuccessSeries {
  WalkConfig config;
  /// p(t) = Σ_d amplitude(w, d)² after t steps, t = 0..t_max.
  std::vector<double> probabilities;
  /// amplitude(w, SelfLoop)² after t steps; the self-loop share of p(t).
  std::vector<double> self_loop;

  Index t_max() const noexcept {
    return static_cast<Index>(probabilities.size()) - 1;
  }
};

struct PeakResult {
  Index t_star = 0;
  double p_star = 0.0;

  bool operator==(const PeakResult&) const = default;
};

/// First-peak detection.
///
/// t* is the smallest t ≥ 1 with p(t) ≥ p(t−k) (for t−k ≥ 0) and
/// p(t) > p(t+k) + plateau for every k = 1..window. A window of 1 is the
/// plain local-maximum test. The default window of 2 looks through the
/// period-2 zig-zag that SKW walks with l > 0 show on even tori, and gives
/// the same answer as window 1 on smooth Grover runs.
struct PeakRule {
  int window = 2;
  double plateau = 1e-12;
};

template <typename Scalar = double>
SuccessSeries run_series(const WalkConfig& config, Index t_max) {
  if (t_max < 1) {
    throw InvalidConfig("t_max must be >= 1, got " + std::to_string(t_max));
  }
  Stepper<Scalar> stepper(config);
  WalkerState<Scalar> state = build_start_state<Scalar>(config);
  SuccessSeries series{config, {}, {}};
  series.probabilities.reserve(static_cast<std::size_t>(t_max) + 1);
  series.self_loop.reserve(static_cast<std::size_t>(t_max) + 1);
  const auto record = [&] {
    const Scalar loop = state(config.marked, Direction::SelfLoop);
    series.probabilities.push_back(
        static_cast<double>(state.vertex_probability(config.marked)));
    series.self_loop.push_back(static_cast<double>(loop * loop));
  };
  record();
  for (Index t = 0; t < t_max; ++t) {
    stepper.step(state);
    record();
  }
  return series;
}

inline PeakResult find_first_peak(std::span<const double> p,
                                  PeakRule rule = {}) {
  const auto size = static_cast<Index>(p.size());
  const Index window = rule.window < 1 ? 1 : rule.window;
  for (Index t = 1; t + window < size; ++t) {
    bool peak = true;
    for (Index k = 1; k <= window && peak; ++k) {
      if (t - k >= 0 && p[t] < p[t - k]) peak = false;
      if (!(p[t] > p[t + k] + rule.plateau)) peak = false;
    }
    if (peak) return {t, p[t]};
  }
  throw NoPeakFound("no first peak within " + std::to_string(size - 1) +
                    " steps; increase t_max");
}

inline PeakResult find_first_peak(const SuccessSeries& series,
                                  PeakRule rule = {}) {
  return find_first_peak(std::span<const double>(series.probabilities), rule);
}

/// ceil(3·√(N ln N)), about three times the expected t* at l = 4/N.
inline Index default_horizon(Index vertices) {
  const double n = static_cast<double>(vertices);
  return static_cast<Index>(std::ceil(3.0 * std::sqrt(n * std::log(n))));
}

template <typename Scalar = double>
PeakResult auto_peak(const WalkConfig& config, PeakRule rule = {},
                     int max_retries = 3) {
  Index horizon = default_horizon(config.geometry.vertices());
  for (int attempt = 0;; ++attempt) {
    try {
      return find_first_peak(run_series<Scalar>(config, horizon), rule);
    } catch (const NoPeakFound&) {
      if (attempt >= max_retries) {
        throw NoPeakFound("no first peak within " + std::to_string(horizon) +
                          " steps after " + std::to_string(max_retries) +
                          " retries (n=" +
                          std::to_string(config.geometry.side()) + ")");
      }
      horizon *= 2;
    }
  }
}

}  // namespace lqw
