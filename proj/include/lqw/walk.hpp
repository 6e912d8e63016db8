#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "lqw/errors.hpp"
#include "lqw/geometry.hpp"

namespace lqw {

enum class Oracle { None, Grover, Skw };

inline std::string_view to_string(Oracle o) noexcept {
  switch (o) {
    case Oracle::None: return "none";
    case Oracle::Grover: return "grover";
    case Oracle::Skw: return "skw";
  }
  return "?";
}

inline Oracle parse_oracle(std::string_view name) {
  if (name == "none") return Oracle::None;
  if (name == "grover") return Oracle::Grover;
  if (name == "skw") return Oracle::Skw;
  throw InvalidConfig("unknown oracle '" + std::string(name) +
                      "' (expected grover, skw or none)");
}

struct WalkConfig {
  GridGeometry geometry{2};
  double loop_weight = 0.0;
  Oracle oracle = Oracle::Grover;
  Index marked = 0;

  void validate() const {
    if (!(loop_weight >= 0.0) || !std::isfinite(loop_weight)) {
      throw InvalidConfig("loop weight must be finite and >= 0");
    }
    if (marked < 0 || marked >= geometry.vertices()) {
      throw InvalidConfig("marked vertex " + std::to_string(marked) +
                          " outside [0, " +
                          std::to_string(geometry.vertices()) + ")");
    }
  }

  /// The l = 4/N configuration.
  static WalkConfig critical(Index side, Oracle oracle = Oracle::Grover) {
    GridGeometry g(side);
    return {g, 4.0 / static_cast<double>(g.vertices()), oracle, 0};
  }
};

template <typename Scalar>
using CoinVector = Eigen::Matrix<Scalar, 5, 1>;

/// s_c = (1, 1, 1, 1, √l) / √(4 + l), in Direction order.
template <typename Scalar = double>
CoinVector<Scalar> coin_vector(double loop_weight) {
  using std::sqrt;
  const Scalar l = static_cast<Scalar>(loop_weight);
  const Scalar scale = Scalar(1) / sqrt(Scalar(4) + l);
  CoinVector<Scalar> s;
  s << scale, scale, scale, scale, sqrt(l) * scale;
  return s;
}

/// Real amplitudes of the walker, one 5-row column per vertex.
///
/// The storage is column-major, so the flattened vector is vertex-major and
/// direction-minor: amplitude (v, d) lives at 5·v + d.
template <typename Scalar = double>
class WalkerState {
 public:
  using Amplitudes = Eigen::Matrix<Scalar, 5, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit WalkerState(GridGeometry geometry)
      : geometry_(geometry), amps_(Amplitudes::Zero(5, geometry.vertices())) {}

  static WalkerState basis(GridGeometry geometry, Index v, Direction d) {
    WalkerState s(geometry);
    s(v, d) = Scalar(1);
    return s;
  }

  template <typename Derived>
  static WalkerState from_vector(GridGeometry geometry,
                                 const Eigen::MatrixBase<Derived>& flat) {
    if (flat.size() != geometry.dimension()) {
      throw InvalidConfig("state vector has length " +
                          std::to_string(flat.size()) + ", expected " +
                          std::to_string(geometry.dimension()));
    }
    WalkerState s(geometry);
    s.flat() = flat;
    return s;
  }

  const GridGeometry& geometry() const noexcept { return geometry_; }

  Scalar& operator()(Index v, Direction d) { return amps_(index_of(d), v); }
  Scalar operator()(Index v, Direction d) const { return amps_(index_of(d), v); }

  Amplitudes& amplitudes() noexcept { return amps_; }
  const Amplitudes& amplitudes() const noexcept { return amps_; }

  auto block(Index v) { return amps_.col(v); }
  auto block(Index v) const { return amps_.col(v); }

  Eigen::Map<Vector> flat() { return {amps_.data(), amps_.size()}; }
  Eigen::Map<const Vector> flat() const { return {amps_.data(), amps_.size()}; }

  Scalar squared_norm() const { return amps_.squaredNorm(); }

  /// Σ_d amplitude(v, d)², the probability of finding the walker at v.
  Scalar vertex_probability(Index v) const { return amps_.col(v).squaredNorm(); }

 private:
  GridGeometry geometry_;
  Amplitudes amps_;
};

/// Start state: s_c/√N on every vertex.
template <typename Scalar = double>
WalkerState<Scalar> build_start_state(const WalkConfig& config) {
  using std::sqrt;
  config.validate();
  WalkerState<Scalar> state(config.geometry);
  const CoinVector<Scalar> s =
      coin_vector<Scalar>(config.loop_weight) /
      sqrt(static_cast<Scalar>(config.geometry.vertices()));
  state.amplitudes().colwise() = s;
  return state;
}

/// C = 2|s_c⟩⟨s_c| − I on every vertex block.
template <typename Scalar>
void apply_coin(WalkerState<Scalar>& state, const CoinVector<Scalar>& s) {
  auto& a = state.amplitudes();
  for (Index v = 0; v < a.cols(); ++v) {
    const Scalar overlap = s.dot(a.col(v));
    a.col(v) = (Scalar(2) * overlap) * s - a.col(v);
  }
}

template <typename Scalar>
void apply_coin(WalkerState<Scalar>& state, double loop_weight) {
  apply_coin(state, coin_vector<Scalar>(loop_weight));
}

/// Flip-flop shift: (v, d) → (neighbor(v, d), reverse(d)). Writes into `out`,
/// which must share the geometry of `in` and must not alias it.
template <typename Scalar>
void apply_shift(const WalkerState<Scalar>& in, WalkerState<Scalar>& out) {
  const GridGeometry& g = in.geometry();
  const Index n = g.side();
  const auto& src = in.amplitudes();
  auto& dst = out.amplitudes();
  constexpr Index up = index_of(Direction::Up);
  constexpr Index down = index_of(Direction::Down);
  constexpr Index left = index_of(Direction::Left);
  constexpr Index right = index_of(Direction::Right);
  constexpr Index loop = index_of(Direction::SelfLoop);
  for (Index r = 0; r < n; ++r) {
    const Index r_up = (r == 0 ? n - 1 : r - 1) * n;
    const Index r_down = (r == n - 1 ? 0 : r + 1) * n;
    const Index r_here = r * n;
    for (Index c = 0; c < n; ++c) {
      const Index c_left = c == 0 ? n - 1 : c - 1;
      const Index c_right = c == n - 1 ? 0 : c + 1;
      const Index v = r_here + c;
      dst(down, r_up + c) = src(up, v);
      dst(up, r_down + c) = src(down, v);
      dst(right, r_here + c_left) = src(left, v);
      dst(left, r_here + c_right) = src(right, v);
      dst(loop, v) = src(loop, v);
    }
  }
}

template <typename Scalar>
void apply_shift(WalkerState<Scalar>& state) {
  WalkerState<Scalar> out(state.geometry());
  apply_shift(state, out);
  state = std::move(out);
}

/// Q ⊗ I₅: negate every amplitude at the marked vertex.
template <typename Scalar>
void apply_oracle_grover(WalkerState<Scalar>& state, Index marked) {
  state.amplitudes().col(marked) *= Scalar(-1);
}

/// I − 2|w, s_c⟩⟨w, s_c|: reflect the marked block away from s_c.
template <typename Scalar>
void apply_oracle_skw(WalkerState<Scalar>& state, Index marked,
                      const CoinVector<Scalar>& s) {
  auto block = state.amplitudes().col(marked);
  const Scalar overlap = s.dot(block);
  block -= (Scalar(2) * overlap) * s;
}

template <typename Scalar>
void apply_oracle_skw(WalkerState<Scalar>& state, Index marked,
                      double loop_weight) {
  apply_oracle_skw(state, marked, coin_vector<Scalar>(loop_weight));
}

template <typename Scalar>
void apply_oracle(WalkerState<Scalar>& state, const WalkConfig& config,
                  const CoinVector<Scalar>& s) {
  switch (config.oracle) {
    case Oracle::None: break;
    case Oracle::Grover: apply_oracle_grover(state, config.marked); break;
    case Oracle::Skw: apply_oracle_skw(state, config.marked, s); break;
  }
}

/// Repeated-step evolution with a reusable shift buffer.
///
/// One step is oracle, then coin, then shift, i.e. S·(I⊗C)·O read right to
/// left.
template <typename Scalar = double>
class Stepper {
 public:
  explicit Stepper(const WalkConfig& config)
      : config_((config.validate(), config)),
        coin_(coin_vector<Scalar>(config.loop_weight)),
        scratch_(config.geometry) {}

  const WalkConfig& config() const noexcept { return config_; }
  const CoinVector<Scalar>& coin() const noexcept { return coin_; }

  void step(WalkerState<Scalar>& state) {
    apply_oracle(state, config_, coin_);
    apply_coin(state, coin_);
    apply_shift(state, scratch_);
    std::swap(state.amplitudes(), scratch_.amplitudes());
  }

 private:
  WalkConfig config_;
  CoinVector<Scalar> coin_;
  WalkerState<Scalar> scratch_;
};

template <typename Scalar>
void walk_step(WalkerState<Scalar>& state, const WalkConfig& config) {
  Stepper<Scalar>(config).step(state);
}

}  // namespace lqw
