#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lqw/simulate.hpp"
#include "lqw/spectral.hpp"
#include "reference.hpp"

using namespace lqw;

namespace {

WalkConfig config_of(Index n, double l, Oracle oracle = Oracle::None, Index marked = 0) {
  return {GridGeometry(n), l, oracle, marked};
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("walk matrix construction") {
  SUBCASE("n=2, l=0 is a 20x20 orthogonal matrix") {
    const auto u = build_walk_matrix(config_of(2, 0.0));
    CHECK(u.rows() == 20);
    CHECK(u.cols() == 20);
    CHECK(orthogonality_defect(u) < 1e-12);
  }
  SUBCASE("fixes the start state") {
    for (Index n : {2, 3, 4, 6}) {
      for (double l : {0.0, 0.1, 4.0 / (n * n), 2.0}) {
        const auto config = config_of(n, l);
        const auto u = build_walk_matrix(config);
        const auto psi0 = build_start_state(config);
        CHECK((u * psi0.flat() - psi0.flat()).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
  SUBCASE("agrees with walk_step and the reference construction") {
    std::mt19937_64 rng(17);
    const auto config = config_of(4, 0.1);
    const auto u = build_walk_matrix(config);
    CHECK(max_abs(u - reference::walk(4, 0.1)) < 1e-14);
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::VectorXd v = reference::random_unit(rng, 80);
      auto state = WalkerState<double>::from_vector(config.geometry, v);
      walk_step(state, config);
      CHECK((u * v - state.flat()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("consistency with walk_step up to n=8 for every oracle") {
    std::mt19937_64 rng(18);
    for (Index n : {5, 8}) {
      for (Oracle oracle : {Oracle::Grover, Oracle::Skw}) {
        const auto config = config_of(n, 0.3, oracle, 2);
        const auto step = build_search_matrix(config);
        CHECK(max_abs(step - build_walk_matrix(config) * build_oracle_matrix(config)) < 1e-14);
        for (int trial = 0; trial < 5; ++trial) {
          const Eigen::VectorXd v = reference::random_unit(rng, static_cast<int>(5 * n * n));
          auto state = WalkerState<double>::from_vector(config.geometry, v);
          walk_step(state, config);
          CHECK((step * v - state.flat()).cwiseAbs().maxCoeff() < 1e-10);
        }
      }
    }
  }
  SUBCASE("oracle matrices match their definitions") {
    CHECK(max_abs(build_oracle_matrix(config_of(3, 0.2, Oracle::Grover, 4)) - reference::grover_oracle(3, 4)) == 0.0);
    CHECK(max_abs(build_oracle_matrix(config_of(3, 0.2, Oracle::Skw, 4)) - reference::skw_oracle(3, 0.2, 4)) < 1e-15);
  }
  CHECK_THROWS_AS(build_walk_matrix(config_of(17, 0.0)), GridTooLarge);
}

TEST_CASE("eigendecompose") {
  SUBCASE("identity") {
    const auto eig = eigendecompose<double>(Eigen::MatrixXd::Identity(7, 7));
    CHECK(eig.plus_one_multiplicity() == 7);
    CHECK(eig.minus_one_multiplicity() == 0);
    CHECK(eig.rotations.empty());
  }
  SUBCASE("hand-built rotation blocks") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
    const double th = 0.7;
    m.block(0, 0, 2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    m.block(2, 2, 2, 2) << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    m(4, 4) = -1.0;
    const auto eig = eigendecompose<double>(m);
    REQUIRE(eig.rotations.size() == 1);
    CHECK(eig.rotations[0].multiplicity() == 2);
    CHECK(eig.rotations[0].theta == doctest::Approx(th).epsilon(1e-12));
    CHECK(eig.minus_one_multiplicity() == 1);
  }
  SUBCASE("non-orthogonal input") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 1) = 1e-6;
    CHECK_THROWS_AS(eigendecompose<double>(m), NotOrthogonal);
    CHECK_THROWS_AS(eigendecompose<double>(Eigen::MatrixXd::Zero(3, 4)), NotOrthogonal);
  }
  SUBCASE("n=4, l=0.25 accounts for all 80 dimensions") {
    const auto eig = eigendecompose(build_walk_matrix(config_of(4, 0.25)));
    CHECK(eig.dimension() == 80);
  }
  SUBCASE("class invariants on walk operators") {
    for (Index n : {2, 3, 4}) {
      for (double l : {0.0, 0.1, 4.0 / (n * n)}) {
        CAPTURE(n);
        CAPTURE(l);
        const auto config = config_of(n, l);
        const auto u = build_walk_matrix(config);
        const auto eig = eigendecompose(u);
        CHECK(eig.dimension() == 5 * n * n);
        // Reconstruction Σ λ|Φ⟩⟨Φ| = U.
        const auto rebuilt = eig.reconstruct();
        CHECK(rebuilt.imag().cwiseAbs().maxCoeff() < 1e-8);
        CHECK(max_abs(rebuilt.real() - u) < 1e-8);
        // Basis vectors really are eigenvectors.
        for (const auto& r : eig.rotations) {
          CHECK(r.theta > 0.0);
          CHECK(r.theta < std::numbers::pi);
          for (Index p = 0; p < r.multiplicity(); ++p) {
            const auto q1 = r.basis.col(2 * p), q2 = r.basis.col(2 * p + 1);
            CHECK((u * q1 - (std::cos(r.theta) * q1 + std::sin(r.theta) * q2)).cwiseAbs().maxCoeff() < 1e-9);
            const auto plus = r.phi_plus(p);
            const Eigen::VectorXcd lhs = u.cast<std::complex<double>>() * plus;
            CHECK((lhs - std::polar(1.0, r.theta) * plus).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((r.phi_minus(p) - plus.conjugate()).cwiseAbs().maxCoeff() == 0.0);
          }
        }
        CHECK(max_abs(u * eig.plus_one - eig.plus_one) < 1e-9);
        CHECK(max_abs(u * eig.minus_one + eig.minus_one) < 1e-9);
      }
    }
  }
  SUBCASE("start state lies in the +1 eigenspace, which is degenerate") {
    // Multiplicities measured here and by an independent numpy run.
    const auto config = config_of(4, 0.0);
    const auto eig = eigendecompose(build_walk_matrix(config));
    CHECK(eig.plus_one_multiplicity() == 18);
    const auto psi0 = build_start_state(config);
    CHECK((eig.plus_one.transpose() * psi0.flat()).norm() == doctest::Approx(1.0).epsilon(1e-12));
    // On vertex-uniform states u ⊗ c, U acts as R·C with R the direction
    // reversal. Its +1 space is s_c plus the two reversal-odd currents
    // (1,-1,0,0,0) and (0,0,1,-1,0), all orthogonal to |w, s_c> but s_c.
    Eigen::MatrixXd uniform(80, 5);
    for (int d = 0; d < 5; ++d) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
      c(d) = 1.0;
      uniform.col(d) = c.replicate(16, 1) / 4.0;
    }
    const Eigen::MatrixXd restricted = uniform.transpose() * eig.plus_one;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted);
    CHECK((svd.singularValues().array() > 1e-8).count() == 3);
    Eigen::VectorXd current = Eigen::VectorXd::Zero(5);
    current << 1, -1, 0, 0, 0;
    const Eigen::VectorXd uniform_current = current.replicate(16, 1) / std::sqrt(32.0);
    CHECK((eig.plus_one.transpose() * uniform_current).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(uniform_current.dot(reference::good_state(4, 0.0, 0))) < 1e-15);
  }
  SUBCASE("spectrum on the unit circle for a larger grid") {
    const auto u = build_walk_matrix(config_of(8, 0.0625));
    const auto eig = eigendecompose(u);
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(u, false).eigenvalues();
    CHECK((ev.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(eig.dimension() == 320);
  }
}

TEST_CASE("good-state expansion") {
  const auto config = config_of(4, 0.0);
  const auto eig = eigendecompose(build_walk_matrix(config));
  SUBCASE("a +1 eigenvector has a0 = 1") {
    const Eigen::VectorXd phi0 = eig.plus_one.col(3);
    const auto exp = expand_good_state(eig, phi0);
    CHECK(exp.a0 == doctest::Approx(1.0).epsilon(1e-12));
    for (double a : exp.a_j) CHECK(std::abs(a) < 1e-12);
    for (double a : exp.a_k) CHECK(std::abs(a) < 1e-12);
  }
  SUBCASE("|w, s_c> on n=4") {
    const auto exp = expand_good_state(eig, reference::good_state(4, 0.0, 0));
    CHECK(std::abs(exp.completeness() - 1.0) < 1e-8);
    CHECK(exp.a0 == doctest::Approx(0.25).epsilon(1e-12));
    for (double a : exp.a_j) CHECK(a >= 0.0);
  }
  SUBCASE("property: Parseval for random unit vectors") {
    std::mt19937_64 rng(99);
    const auto eig2 = eigendecompose(build_walk_matrix(config_of(3, 0.4)));
    for (int trial = 0; trial < 10; ++trial) {
      const auto exp = expand_good_state(eig2, reference::random_unit(rng, 45));
      CHECK(std::abs(exp.completeness() - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("alpha") {
  SUBCASE("hand evaluation: one pair at theta = pi") {
    GoodStateExpansion<double> exp;
    exp.a0 = 1.0 / std::sqrt(3.0);
    exp.a_j = {1.0 / std::sqrt(3.0)};
    exp.theta = {std::numbers::pi};
    CHECK(exp.completeness() == doctest::Approx(1.0));
    CHECK(compute_alpha(exp) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("only -1 components") {
    GoodStateExpansion<double> exp;
    exp.a0 = 0.6;
    exp.a_k = {0.8};
    CHECK(compute_alpha(exp) == doctest::Approx(0.6 / std::sqrt(0.16)).epsilon(1e-14));
  }
  SUBCASE("divergent sums") {
    GoodStateExpansion<double> exp;
    exp.a0 = 0.5;
    exp.a_j = {0.5};
    exp.theta = {1e-9};
    CHECK_THROWS_AS(compute_alpha(exp), DivergentSum);
    GoodStateExpansion<double> fixed;
    fixed.a0 = 1.0;
    CHECK_THROWS_AS(compute_alpha(fixed), DivergentSum);
  }
  SUBCASE("n=4, l=0 SKW: dual route through the pseudo-inverse of I - U") {
    const auto config = config_of(4, 0.0, Oracle::Skw);
    const auto u = build_walk_matrix(config);
    const auto psi = reference::good_state(4, 0.0, 0);
    const double alpha = compute_alpha(expand_good_state(eigendecompose(u), psi));
    CHECK(std::abs(alpha - reference::alpha_via_pseudoinverse(u, psi)) < 1e-10);
    // Independent complex-Schur evaluation (numpy/scipy).
    CHECK(std::abs(alpha - 0.34132807439314444) < 1e-10);
  }
  SUBCASE("dual route with loops") {
    const auto u = build_walk_matrix(config_of(4, 0.25));
    const auto psi = reference::good_state(4, 0.25, 0);
    const double alpha = compute_alpha(expand_good_state(eigendecompose(u), psi));
    CHECK(std::abs(alpha - reference::alpha_via_pseudoinverse(u, psi)) < 1e-10);
    CHECK(std::abs(alpha - 0.33113687146155685) < 1e-10);
  }
  SUBCASE("runtime estimate vs simulated SKW peak, n=8") {
    const auto report = analyze_framework(config_of(8, 0.0, Oracle::Skw));
    REQUIRE(report.runtime_estimate);
    const double t_sim = static_cast<double>(auto_peak(config_of(8, 0.0, Oracle::Skw)).t_star);
    CHECK(t_sim == 11.0);
    CHECK(*report.runtime_estimate == doctest::Approx(10.944936375760916).epsilon(1e-9));
    CHECK(*report.runtime_estimate <= 2 * t_sim);
    CHECK(*report.runtime_estimate >= t_sim / 2);
  }
}

TEST_CASE("overlap estimates") {
  SUBCASE("single pair at theta = pi") {
    GoodStateExpansion<double> exp;
    exp.a0 = 0.6;
    exp.a_j = {std::sqrt(0.32)};
    exp.theta = {std::numbers::pi};
    const auto o = compute_overlap_estimates(exp);
    CHECK(o.good == doctest::Approx(1.0));
    exp.a_j = {1.5};
    CHECK(compute_overlap_estimates(exp).good == doctest::Approx(1.0 / 1.5));
  }
  SUBCASE("no rotation or -1 weight") {
    GoodStateExpansion<double> exp;
    exp.a0 = 1.0;
    const auto o = compute_overlap_estimates(exp);
    CHECK(o.start == 1.0);
    CHECK(o.good == 1.0);
  }
  SUBCASE("n=4, l=0 SKW regression baseline") {
    const auto report = analyze_framework(config_of(4, 0.0, Oracle::Skw));
    REQUIRE(report.overlap_good);
    CHECK(*report.overlap_good > 0.0);
    CHECK(*report.overlap_good <= 1.0);
    CHECK(std::abs(*report.overlap_good - 0.55824510088424895) < 1e-9);
    CHECK(std::abs(*report.overlap_start - 0.82505419926477541) < 1e-9);
  }
}

TEST_CASE("framework fit") {
  SUBCASE("rank dichotomy") {
    for (Index n : {2, 3, 4}) {
      for (double l : {0.0, 0.1, 4.0 / (n * n)}) {
        CAPTURE(n);
        CAPTURE(l);
        const auto grover = analyze_framework(config_of(n, l, Oracle::Grover, 1));
        CHECK(grover.projector_rank == 5);
        CHECK_FALSE(grover.fits);
        CHECK_FALSE(grover.alpha);
        const auto skw = analyze_framework(config_of(n, l, Oracle::Skw, 1));
        CHECK(skw.projector_rank == 1);
        CHECK(skw.fits);
        REQUIRE(skw.psi_good);
        CHECK((*skw.psi_good - reference::good_state(static_cast<int>(n), l, 1)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(skw.expansion->completeness() - 1.0) < 1e-8);
        CHECK(skw.expansion->a0 == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("identity factor") {
    const auto walk = eigendecompose(build_walk_matrix(config_of(2, 0.0)));
    const auto report = check_framework_fit<double>(Eigen::MatrixXd::Identity(20, 20), walk);
    CHECK(report.projector_rank == 0);
    CHECK_FALSE(report.fits);
  }
  SUBCASE("malformed oracle") {
    const auto walk = eigendecompose(build_walk_matrix(config_of(2, 0.0)));
    CHECK_THROWS_AS(check_framework_fit<double>(0.5 * Eigen::MatrixXd::Identity(20, 20), walk), NotReflection);
  }
  CHECK(analyze_framework(config_of(3, 0.0, Oracle::None)).projector_rank == 0);
}
