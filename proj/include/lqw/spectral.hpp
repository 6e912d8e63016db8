#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lqw/errors.hpp"
#include "lqw/walk.hpp"

namespace lqw {

template <typename Scalar = double>
using DenseOperator = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest grid side for which explicit 5N×5N operators are built.
inline constexpr Index kMaxSpectralSide = 16;

namespace detail {

inline void require_spectral_size(const GridGeometry& g) {
  if (g.side() > kMaxSpectralSide) {
    throw GridTooLarge("dense operators are limited to n <= " +
                       std::to_string(kMaxSpectralSide) + ", got n=" +
                       std::to_string(g.side()));
  }
}

// Column j of the result is `apply` acting on basis vector e_j.
template <typename Scalar, typename Apply>
DenseOperator<Scalar> tabulate(const GridGeometry& g, Apply&& apply) {
  require_spectral_size(g);
  const Index dim = g.dimension();
  DenseOperator<Scalar> m(dim, dim);
  WalkerState<Scalar> column(g);
  for (Index j = 0; j < dim; ++j) {
    column.flat().setZero();
    column.flat()(j) = Scalar(1);
    apply(column);
    m.col(j) = column.flat();
  }
  return m;
}

}  // namespace detail

/// U = S·(I⊗C), the walk without any oracle.
template <typename Scalar = double>
DenseOperator<Scalar> build_walk_matrix(const WalkConfig& config) {
  config.validate();
  const CoinVector<Scalar> s = coin_vector<Scalar>(config.loop_weight);
  return detail::tabulate<Scalar>(config.geometry,
                                  [&](WalkerState<Scalar>& state) {
                                    apply_coin(state, s);
                                    apply_shift(state);
                                  });
}

/// The oracle factor alone: Q⊗I₅, I − 2|w,s_c⟩⟨w,s_c|, or I for None.
template <typename Scalar = double>
DenseOperator<Scalar> build_oracle_matrix(const WalkConfig& config) {
  config.validate();
  const CoinVector<Scalar> s = coin_vector<Scalar>(config.loop_weight);
  return detail::tabulate<Scalar>(
      config.geometry,
      [&](WalkerState<Scalar>& state) { apply_oracle(state, config, s); });
}

/// One full search step, U·O.
template <typename Scalar = double>
DenseOperator<Scalar> build_search_matrix(const WalkConfig& config) {
  Stepper<Scalar> stepper(config);
  return detail::tabulate<Scalar>(
      config.geometry, [&](WalkerState<Scalar>& state) { stepper.step(state); });
}

/// 2D real invariant subspace pairs sharing one rotation angle θ ∈ (0, π).
///
/// Columns come in pairs (q1, q2) with U q1 = cos θ q1 + sin θ q2 and
/// U q2 = −sin θ q1 + cos θ q2, so Φ± = (q1 ∓ i q2)/√2 has eigenvalue e^{±iθ}.
template <typename Scalar = double>
struct RotationSubspace {
  using Matrix = DenseOperator<Scalar>;
  using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

  Scalar theta{};
  Matrix basis;

  Index multiplicity() const noexcept { return basis.cols() / 2; }

  ComplexVector phi_plus(Index pair) const {
    const std::complex<Scalar> i(Scalar(0), Scalar(1));
    return (basis.col(2 * pair).template cast<std::complex<Scalar>>() -
            i * basis.col(2 * pair + 1).template cast<std::complex<Scalar>>()) /
           std::sqrt(Scalar(2));
  }

  ComplexVector phi_minus(Index pair) const { return phi_plus(pair).conjugate(); }
};

/// Spectrum of a real orthogonal operator split into the +1 eigenspace, the
/// −1 eigenspace and conjugate-pair rotation subspaces. Every basis is real
/// and orthonormal.
template <typename Scalar = double>
struct EigenClass {
  using Matrix = DenseOperator<Scalar>;
  using ComplexMatrix =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix plus_one;
  Matrix minus_one;
  std::vector<RotationSubspace<Scalar>> rotations;
  Scalar tolerance{};

  Index plus_one_multiplicity() const noexcept { return plus_one.cols(); }
  Index minus_one_multiplicity() const noexcept { return minus_one.cols(); }

  Index dimension() const noexcept {
    Index d = plus_one.cols() + minus_one.cols();
    for (const auto& r : rotations) d += 2 * r.multiplicity();
    return d;
  }

  /// Σ λ |Φ⟩⟨Φ| over every eigenvector.
  ComplexMatrix reconstruct() const {
    using C = std::complex<Scalar>;
    const Index dim = plus_one.rows();
    ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
    u += (plus_one * plus_one.transpose()).template cast<C>();
    u -= (minus_one * minus_one.transpose()).template cast<C>();
    for (const auto& r : rotations) {
      const C lambda = std::polar(Scalar(1), r.theta);
      for (Index p = 0; p < r.multiplicity(); ++p) {
        const auto plus = r.phi_plus(p);
        const auto minus = r.phi_minus(p);
        u += lambda * plus * plus.adjoint();
        u += std::conj(lambda) * minus * minus.adjoint();
      }
    }
    return u;
  }
};

template <typename Derived>
typename Derived::Scalar orthogonality_defect(const Eigen::MatrixBase<Derived>& op) {
  using Scalar = typename Derived::Scalar;
  const Index dim = op.rows();
  return (op.transpose() * op - DenseOperator<Scalar>::Identity(dim, dim))
      .cwiseAbs()
      .maxCoeff();
}

/// Classify the spectrum of a real orthogonal matrix.
///
/// A normal matrix has a block-diagonal real Schur form, so the Schur
/// vectors split directly into eigenspaces. Eigenvalues within `tol` of ±1
/// go to the ±1 classes; the rest are grouped by θ = |arg λ| within `tol`.
template <typename Scalar = double>
EigenClass<Scalar> eigendecompose(const DenseOperator<Scalar>& op,
                                  Scalar tol = Scalar(1e-9)) {
  using std::abs;
  using std::atan2;
  using std::sqrt;
  using std::hypot;
  if (op.rows() != op.cols()) throw NotOrthogonal("operator is not square");
  if (const Scalar defect = orthogonality_defect(op); !(defect <= tol)) {
    throw NotOrthogonal("max |U^T U - I| = " + std::to_string(static_cast<double>(defect)) +
                        " exceeds tolerance");
  }
  const Index dim = op.rows();
  Eigen::RealSchur<DenseOperator<Scalar>> schur(op, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw NotOrthogonal("real Schur decomposition did not converge");
  }
  const auto& t = schur.matrixT();
  const auto& z = schur.matrixU();

  std::vector<Index> plus, minus;
  struct Pair {
    Scalar theta;
    Index first;
    bool flip;
  };
  std::vector<Pair> pairs;

  for (Index i = 0; i < dim;) {
    if (i + 1 < dim && t(i + 1, i) != Scalar(0)) {
      const Scalar a = t(i, i), b = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
      const Scalar re = (a + d) / 2;
      const Scalar half_gap = (a - d) / 2;
      const Scalar im = sqrt(std::max(Scalar(0), -(half_gap * half_gap + b * c)));
      if (hypot(re - 1, im) < tol) {
        plus.insert(plus.end(), {i, i + 1});
      } else if (hypot(re + 1, im) < tol) {
        minus.insert(minus.end(), {i, i + 1});
      } else {
        pairs.push_back({atan2(im, re), i, c < Scalar(0)});
      }
      i += 2;
    } else {
      const Scalar lambda = t(i, i);
      if (abs(lambda - 1) < tol) {
        plus.push_back(i);
      } else if (abs(lambda + 1) < tol) {
        minus.push_back(i);
      } else {
        throw NotOrthogonal("real eigenvalue " + std::to_string(static_cast<double>(lambda)) +
                            " is off the unit circle");
      }
      ++i;
    }
  }

  EigenClass<Scalar> out;
  out.tolerance = tol;
  out.plus_one.resize(dim, static_cast<Index>(plus.size()));
  for (std::size_t k = 0; k < plus.size(); ++k) out.plus_one.col(k) = z.col(plus[k]);
  out.minus_one.resize(dim, static_cast<Index>(minus.size()));
  for (std::size_t k = 0; k < minus.size(); ++k) out.minus_one.col(k) = z.col(minus[k]);

  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& x, const Pair& y) { return x.theta < y.theta; });
  for (std::size_t k = 0; k < pairs.size();) {
    std::size_t end = k + 1;
    while (end < pairs.size() && pairs[end].theta - pairs[k].theta < tol) ++end;
    RotationSubspace<Scalar> r;
    Scalar theta_sum(0);
    r.basis.resize(dim, static_cast<Index>(2 * (end - k)));
    for (std::size_t m = k; m < end; ++m) {
      const Index col = static_cast<Index>(2 * (m - k));
      theta_sum += pairs[m].theta;
      r.basis.col(col) = z.col(pairs[m].first);
      r.basis.col(col + 1) = (pairs[m].flip ? Scalar(-1) : Scalar(1)) * z.col(pairs[m].first + 1);
    }
    r.theta = theta_sum / static_cast<Scalar>(end - k);
    out.rotations.push_back(std::move(r));
    k = end;
  }
  return out;
}

/// Coefficients of ψ_good in the eigenbasis of U.
///
/// a0 is the length of the projection onto the whole +1 eigenspace. Each
/// a_j belongs to one rotation subspace and satisfies 2·a_j² = |P_j ψ|², the
/// phase-fixed a_j⁺ = a_j⁻ = a_j ≥ 0.
template <typename Scalar = double>
struct GoodStateExpansion {
  Scalar a0{};
  std::vector<Scalar> a_k;
  std::vector<Scalar> a_j;
  std::vector<Scalar> theta;

  Scalar completeness() const {
    Scalar total = a0 * a0;
    for (Scalar a : a_k) total += a * a;
    for (Scalar a : a_j) total += 2 * a * a;
    return total;
  }
};

template <typename Scalar, typename Derived>
GoodStateExpansion<Scalar> expand_good_state(const EigenClass<Scalar>& eig,
                                             const Eigen::MatrixBase<Derived>& psi_good) {
  using std::sqrt;
  GoodStateExpansion<Scalar> out;
  out.a0 = (eig.plus_one.transpose() * psi_good).norm();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ak = eig.minus_one.transpose() * psi_good;
  out.a_k.assign(ak.data(), ak.data() + ak.size());
  for (const auto& r : eig.rotations) {
    const Scalar projected = (r.basis.transpose() * psi_good).squaredNorm();
    out.a_j.push_back(sqrt(projected / 2));
    out.theta.push_back(r.theta);
  }
  return out;
}

namespace detail {

template <typename Scalar>
struct ExpansionSums {
  Scalar rotation{};     // Σ a_j² / (1 − cos θ_j)
  Scalar rotation_sq{};  // Σ a_j² / (1 − cos θ_j)²
  Scalar cotangent{};    // Σ a_j² cot²(θ_j / 4)
  Scalar minus{};        // Σ a_k²
};

template <typename Scalar>
ExpansionSums<Scalar> expansion_sums(const GoodStateExpansion<Scalar>& exp) {
  using std::abs;
  using std::cos;
  using std::tan;
  constexpr Scalar kSmallAngle = Scalar(1e-6);
  constexpr Scalar kNegligible = Scalar(1e-8);
  ExpansionSums<Scalar> s;
  for (std::size_t j = 0; j < exp.a_j.size(); ++j) {
    const Scalar a = exp.a_j[j];
    const Scalar theta = exp.theta[j];
    if (abs(a) <= kNegligible) continue;
    if (theta < kSmallAngle) {
      throw DivergentSum("good state has weight " + std::to_string(static_cast<double>(a)) +
                         " on rotation angle " + std::to_string(static_cast<double>(theta)));
    }
    const Scalar gap = 1 - cos(theta);
    const Scalar cot = 1 / tan(theta / 4);
    s.rotation += a * a / gap;
    s.rotation_sq += a * a / (gap * gap);
    s.cotangent += a * a * cot * cot;
  }
  for (Scalar a : exp.a_k) s.minus += a * a;
  return s;
}

}  // namespace detail

/// α = a0 / √(Σ_j a_j²/(1 − cos θ_j) + ¼ Σ_k a_k²), with unit Θ-constant.
template <typename Scalar>
Scalar compute_alpha(const GoodStateExpansion<Scalar>& exp) {
  using std::sqrt;
  const auto s = detail::expansion_sums(exp);
  const Scalar denom = s.rotation + s.minus / 4;
  if (!(denom > Scalar(0))) {
    throw DivergentSum("good state has no weight outside the +1 eigenspace");
  }
  return exp.a0 / sqrt(denom);
}

template <typename Scalar>
struct OverlapEstimates {
  Scalar start{};  // |⟨ψ_start|w_start⟩|
  Scalar good{};   // |⟨ψ_good|w_good⟩|
};

template <typename Scalar>
OverlapEstimates<Scalar> compute_overlap_estimates(const GoodStateExpansion<Scalar>& exp) {
  using std::sqrt;
  const auto s = detail::expansion_sums(exp);
  OverlapEstimates<Scalar> out;
  out.good = s.cotangent > Scalar(0) ? std::min(Scalar(1) / sqrt(s.cotangent), Scalar(1))
                                     : Scalar(1);
  const Scalar denom = s.rotation + s.minus / 4;
  if (denom > Scalar(0)) {
    // α⁴ / a0² = a0² / denom²
    const Scalar weight = exp.a0 * exp.a0 / (denom * denom);
    out.start = std::clamp(Scalar(1) - weight * (s.rotation_sq + s.minus), Scalar(0), Scalar(1));
  } else {
    out.start = Scalar(1);
  }
  return out;
}

template <typename Scalar = double>
struct FrameworkReport {
  bool fits = false;
  Index projector_rank = 0;
  Index plus_one_multiplicity = 0;
  Scalar tolerance{};
  std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> psi_good;
  std::optional<GoodStateExpansion<Scalar>> expansion;
  std::optional<Scalar> alpha;
  std::optional<Scalar> runtime_estimate;
  std::optional<Scalar> overlap_start;
  std::optional<Scalar> overlap_good;
};

inline constexpr double kProjectorTolerance = 1e-8;

/// Does `oracle_factor` have the form I − 2|ψ_good⟩⟨ψ_good|?
///
/// The rank of (I − O)/2 is counted from its singular values. Only rank 1
/// fits; that direction becomes ψ_good and is expanded in `walk` to fill
/// the α, runtime and overlap estimates.
template <typename Scalar = double>
FrameworkReport<Scalar> check_framework_fit(const DenseOperator<Scalar>& oracle_factor,
                                            const EigenClass<Scalar>& walk) {
  using std::abs;
  const Index dim = oracle_factor.rows();
  if (oracle_factor.cols() != dim) throw NotReflection("oracle factor is not square");
  const DenseOperator<Scalar> projector =
      (DenseOperator<Scalar>::Identity(dim, dim) - oracle_factor) / Scalar(2);
  const Scalar idempotence = (projector * projector - projector).cwiseAbs().maxCoeff();
  if (!(idempotence < Scalar(kProjectorTolerance))) {
    throw NotReflection("(I - O)/2 is not a projector: max |P^2 - P| = " +
                        std::to_string(static_cast<double>(idempotence)));
  }
  Eigen::BDCSVD<DenseOperator<Scalar>> svd(projector);
  const auto& sv = svd.singularValues();
  FrameworkReport<Scalar> report;
  report.tolerance = walk.tolerance;
  report.plus_one_multiplicity = walk.plus_one_multiplicity();
  report.projector_rank = (sv.array() > Scalar(kProjectorTolerance)).count();
  report.fits = report.projector_rank == 1;
  if (!report.fits) return report;

  if (walk.plus_one.rows() != dim) {
    throw NotReflection("oracle factor and walk operator dimensions differ");
  }
  // P = ψψᵀ, so its largest column is ψ scaled by one of ψ's entries.
  Index best = 0;
  projector.colwise().norm().maxCoeff(&best);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> psi = projector.col(best).normalized();
  Index peak = 0;
  psi.cwiseAbs().maxCoeff(&peak);
  if (psi(peak) < Scalar(0)) psi = -psi;

  auto exp = expand_good_state(walk, psi);
  const Scalar alpha = compute_alpha(exp);
  const auto overlaps = compute_overlap_estimates(exp);
  report.alpha = alpha;
  report.runtime_estimate = std::numbers::pi_v<Scalar> / (2 * alpha);
  report.overlap_start = overlaps.start;
  report.overlap_good = overlaps.good;
  report.psi_good = std::move(psi);
  report.expansion = std::move(exp);
  return report;
}

/// Build U and the configured oracle factor, then run the framework check.
template <typename Scalar = double>
FrameworkReport<Scalar> analyze_framework(const WalkConfig& config,
                                          Scalar tol = Scalar(1e-9)) {
  const auto walk = eigendecompose<Scalar>(build_walk_matrix<Scalar>(config), tol);
  return check_framework_fit<Scalar>(build_oracle_matrix<Scalar>(config), walk);
}

}  // namespace lqw
