#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qchoc/quantum.hpp"

using namespace qchoc;

namespace {

constexpr double pi = std::numbers::pi;

// Pauli matrices written out by hand, independent of MeasurementAxis::spin_operator.
Matrix2 pauli_dot(double nx, double ny, double nz) {
  const Complex i(0.0, 1.0);
  Matrix2 sx, sy, sz;
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i, i, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  return nx * sx + ny * sy + nz * sz;
}

Matrix2 pauli_dot(const MeasurementAxis& a) {
  return pauli_dot(std::sin(a.theta()) * std::cos(a.phi()), std::sin(a.theta()) * std::sin(a.phi()),
                   std::cos(a.theta()));
}

MeasurementAxis random_axis(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi);
  return {th(rng), ph(rng)};
}

// sum_k |a_k|^2 prod_i (+1 if bit i is up else -1), over the z-measured sites
double z_correlation(const PureState& s, std::initializer_list<std::size_t> sites) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.dim(); ++k) {
    double sign = 1.0;
    for (auto site : sites) sign *= ((k >> (s.num_sites() - site)) & 1U) ? -1.0 : 1.0;
    acc += sign * std::norm(s[k]);
  }
  return acc;
}

}  // namespace

TEST(MeasurementAxis, FoldsAnglesOntoTheSameDirection) {
  const MeasurementAxis a(-pi / 3, 0.0);
  EXPECT_NEAR(a.theta(), pi / 3, 1e-15);
  EXPECT_NEAR(a.phi(), pi, 1e-15);
  const Eigen::Vector3d want(-std::sin(pi / 3), 0.0, std::cos(pi / 3));
  EXPECT_LT((a.direction() - want).norm(), 1e-12);

  const MeasurementAxis b(pi / 4, -pi / 2);
  EXPECT_NEAR(b.phi(), 3 * pi / 2, 1e-15);
  const MeasurementAxis c(4 * pi / 3, 0.0);
  EXPECT_NEAR(c.theta(), 2 * pi / 3, 1e-12);
  EXPECT_THROW(MeasurementAxis(std::nan(""), 0.0), std::invalid_argument);
}

TEST(MeasurementAxis, DirectionHasUnitNorm) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(random_axis(rng).direction().norm(), 1.0, 1e-12);
}

TEST(AxisEigenstates, ZAxisIsComputationalBasis) {
  auto [plus, minus] = axis_eigenstates(MeasurementAxis::z());
  EXPECT_EQ(plus[0], Complex(1.0, 0.0));
  EXPECT_EQ(plus[1], Complex(0.0, 0.0));
  EXPECT_EQ(minus[0], Complex(0.0, 0.0));
  EXPECT_EQ(minus[1], Complex(1.0, 0.0));
}

TEST(AxisEigenstates, XAxisIsEqualSuperposition) {
  auto [plus, minus] = axis_eigenstates(MeasurementAxis::x());
  const double h = std::sqrt(0.5);
  EXPECT_NEAR(std::abs(plus[0] - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(plus[1] - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(minus[0] + h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(minus[1] - h), 0.0, 1e-15);
}

TEST(AxisEigenstates, PhaseConventionMatchesClosedForm) {
  const MeasurementAxis a(1.1, 2.3);
  auto [plus, minus] = axis_eigenstates(a);
  const Complex em = std::exp(Complex(0.0, -2.3 / 2)), ep = std::exp(Complex(0.0, 2.3 / 2));
  EXPECT_LT(std::abs(plus[0] - em * std::cos(0.55)), 1e-15);
  EXPECT_LT(std::abs(plus[1] - ep * std::sin(0.55)), 1e-15);
  EXPECT_LT(std::abs(minus[0] + em * std::sin(0.55)), 1e-15);
  EXPECT_LT(std::abs(minus[1] - ep * std::cos(0.55)), 1e-15);
}

TEST(AxisEigenstates, EigenRelationAtSixtyDegrees) {
  const MeasurementAxis a = MeasurementAxis::xz(pi / 3);
  auto [plus, minus] = axis_eigenstates(a);
  const Matrix2 op = pauli_dot(std::sin(pi / 3), 0.0, std::cos(pi / 3));
  const Complex ev = plus.amplitudes().dot(op * plus.amplitudes());
  EXPECT_NEAR(ev.real(), 1.0, 1e-12);
  EXPECT_NEAR(ev.imag(), 0.0, 1e-12);
}

TEST(AxisEigenstates, OrthonormalEigenvectorsForRandomAxes) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_axis(rng);
    auto [plus, minus] = axis_eigenstates(a);
    const Matrix2 op = pauli_dot(a);
    EXPECT_LT((op * plus.amplitudes() - plus.amplitudes()).norm(), 1e-12);
    EXPECT_LT((op * minus.amplitudes() + minus.amplitudes()).norm(), 1e-12);
    EXPECT_LT(std::abs(plus.amplitudes().dot(minus.amplitudes())), 1e-12);
  }
}

TEST(PureState, RejectsBadInput) {
  EXPECT_THROW(PureState(4, Vector::Zero(16)), std::invalid_argument);
  EXPECT_THROW(PureState(2, Vector::Zero(3)), std::invalid_argument);
  Vector v = Vector::Zero(2);
  v[0] = 1.1;
  EXPECT_THROW(PureState(1, v), std::invalid_argument);
  v[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(PureState(1, v), std::invalid_argument);
}

TEST(SingletState, AmplitudesAndNorm) {
  const auto s = singlet_state();
  EXPECT_NEAR(s.amplitudes().squaredNorm(), 1.0, 1e-12);
  EXPECT_EQ(s[0], Complex(0.0, 0.0));
  EXPECT_EQ(s[3], Complex(0.0, 0.0));
  EXPECT_NEAR(s[1].real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(s[2].real(), -std::sqrt(0.5), 1e-15);
}

TEST(SingletState, SiteSwapFlipsSign) {
  const auto s = singlet_state();
  // swapping two sites exchanges basis indices 01 <-> 10
  const std::size_t swapped[] = {0, 2, 1, 3};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(s[swapped[k]] + s[k]), 1e-15);
}

TEST(GhzState, AmplitudesAndZCorrelation) {
  const auto g = ghz_state();
  EXPECT_NEAR(g.amplitudes().squaredNorm(), 1.0, 1e-12);
  int nonzero = 0;
  for (std::size_t k = 0; k < 8; ++k) nonzero += std::abs(g[k]) > 0.0;
  EXPECT_EQ(nonzero, 2);
  EXPECT_NEAR(g[0].real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(g[7].real(), -std::sqrt(0.5), 1e-15);

  const double oracle = z_correlation(g, {1, 2});
  EXPECT_NEAR(oracle, 1.0, 1e-12);
  const auto z = MeasurementAxis::z();
  EXPECT_NEAR(product_expectation(g, {z, z, std::nullopt}), oracle, 1e-12);
}

TEST(PartialTrace, SingletAndGhzAreMaximallyMixed) {
  const Matrix2 half = Matrix2::Identity() / 2.0;
  for (std::size_t site : {1, 2}) {
    EXPECT_LT((partial_trace(singlet_state(), site).entries() - half).cwiseAbs().maxCoeff(), 1e-12);
  }
  for (std::size_t site : {1, 2, 3}) {
    EXPECT_LT((partial_trace(ghz_state(), site).entries() - half).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PartialTrace, GhzMiddleSiteMatchesExplicitTrace) {
  const auto g = ghz_state();
  Matrix2 oracle = Matrix2::Zero();
  // rho_{ab} = sum_{i,k} psi(i a k) conj(psi(i b k))
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) oracle(a, b) += g[4 * i + 2 * a + k] * std::conj(g[4 * i + 2 * b + k]);
  EXPECT_LT((partial_trace(g, 2).entries() - oracle).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, ProductStateStaysPure) {
  const auto up_down = tensor(basis_state(1, 0), basis_state(1, 1));
  const auto rho = partial_trace(up_down, 1);
  EXPECT_NEAR(rho(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(rho(1, 1)), 0.0, 1e-15);
  const auto rho2 = partial_trace(up_down, 2);
  EXPECT_NEAR(rho2(1, 1).real(), 1.0, 1e-15);
}

TEST(PartialTrace, InvalidSite) {
  EXPECT_THROW(partial_trace(singlet_state(), 0), std::out_of_range);
  EXPECT_THROW(partial_trace(singlet_state(), 3), std::out_of_range);
  EXPECT_THROW(partial_trace(basis_state(1, 0), 1), std::invalid_argument);
}

TEST(DensityMatrix, Invariants) {
  Matrix m = Matrix::Identity(2, 2) / 2.0;
  EXPECT_NO_THROW(DensityMatrix{m});
  Matrix bad_trace = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad_trace}, std::invalid_argument);
  Matrix not_herm = m;
  not_herm(0, 1) = 0.3;
  EXPECT_THROW(DensityMatrix{not_herm}, std::invalid_argument);
  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  EXPECT_THROW(DensityMatrix{negative}, std::invalid_argument);
  EXPECT_THROW(DensityMatrix{Matrix::Identity(3, 3) / 3.0}, std::invalid_argument);
}

TEST(JointOutcomeProb, ReferenceAngles) {
  const auto s = singlet_state();
  const auto z = MeasurementAxis::z();
  const auto n2 = MeasurementAxis::xz(pi / 3), n3 = MeasurementAxis::xz(2 * pi / 3);
  EXPECT_NEAR(joint_outcome_prob(s, {LocalOutcome{z, Sign::plus}, LocalOutcome{n2, Sign::plus}}), 0.125, 1e-12);
  EXPECT_NEAR(joint_outcome_prob(s, {LocalOutcome{z, Sign::plus}, LocalOutcome{n3, Sign::plus}}), 0.375, 1e-12);
  EXPECT_NEAR(joint_outcome_prob(s, {LocalOutcome{n2, Sign::plus}, LocalOutcome{n2, Sign::plus}}), 0.0, 1e-12);
}

TEST(JointOutcomeProb, MatchesEigenstateOverlap) {
  // |<a_s (x) b_t | psi>|^2 computed from the eigenvectors, not the projectors
  std::mt19937_64 rng(21);
  const auto psi = singlet_state();
  for (int i = 0; i < 50; ++i) {
    const auto a = random_axis(rng), b = random_axis(rng);
    for (Sign sa : {Sign::plus, Sign::minus})
      for (Sign sb : {Sign::plus, Sign::minus}) {
        const auto bra = tensor(axis_eigenstate(a, sa), axis_eigenstate(b, sb));
        const double oracle = std::norm(bra.amplitudes().dot(psi.amplitudes()));
        EXPECT_NEAR(joint_outcome_prob(psi, {LocalOutcome{a, sa}, LocalOutcome{b, sb}}), oracle, 1e-12);
      }
  }
}

TEST(JointOutcomeProb, SiteCountMismatch) {
  EXPECT_THROW(joint_outcome_prob(singlet_state(), OutcomeSpec(3)), std::invalid_argument);
}

TEST(Properties, BornCompleteness) {
  std::mt19937_64 rng(3);
  for (const auto& state : {singlet_state(), ghz_state()}) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<MeasurementAxis> axes;
      for (std::size_t i = 0; i < state.num_sites(); ++i) axes.push_back(random_axis(rng));
      double total = 0.0;
      for (unsigned bits = 0; bits < (1U << state.num_sites()); ++bits) {
        OutcomeSpec spec;
        for (std::size_t i = 0; i < state.num_sites(); ++i) {
          spec.push_back(LocalOutcome{axes[i], (bits >> i) & 1U ? Sign::minus : Sign::plus});
        }
        total += joint_outcome_prob(state, spec);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Properties, RotationalInvarianceAndAntiCorrelation) {
  EXPECT_LE(singlet_invariance_residual(MeasurementAxis::z()), 1e-15);
  EXPECT_LE(singlet_invariance_residual(MeasurementAxis::x()), 1e-12);
  EXPECT_LE(singlet_invariance_residual(MeasurementAxis(1.234, 5.678)), 1e-12);
  std::mt19937_64 rng(99);
  const auto s = singlet_state();
  for (int i = 0; i < 100; ++i) {
    const auto a = random_axis(rng);
    EXPECT_LE(singlet_invariance_residual(a), 1e-12);
    EXPECT_NEAR(joint_outcome_prob(s, {LocalOutcome{a, Sign::plus}, LocalOutcome{a, Sign::plus}}), 0.0, 1e-12);
    EXPECT_NEAR(joint_outcome_prob(s, {LocalOutcome{a, Sign::plus}, LocalOutcome{a, Sign::minus}}), 0.5, 1e-12);
    for (std::size_t site = 0; site < 2; ++site) {
      OutcomeSpec spec(2);
      spec[site] = LocalOutcome{a, Sign::plus};
      EXPECT_NEAR(joint_outcome_prob(s, spec), 0.5, 1e-12);
    }
  }
}

TEST(ProductExpectation, GhzParities) {
  const auto g = ghz_state();
  const auto x = MeasurementAxis::x(), y = MeasurementAxis::y();
  EXPECT_NEAR(product_expectation(g, {x, y, y}), 1.0, 1e-12);
  EXPECT_NEAR(product_expectation(g, {y, x, y}), 1.0, 1e-12);
  EXPECT_NEAR(product_expectation(g, {y, y, x}), 1.0, 1e-12);
  EXPECT_NEAR(product_expectation(g, {x, x, x}), -1.0, 1e-12);
}

TEST(ProductExpectation, SingletZZ) {
  const auto s = singlet_state();
  const double oracle = z_correlation(s, {1, 2});
  EXPECT_NEAR(oracle, -1.0, 1e-12);
  EXPECT_NEAR(product_expectation(s, {MeasurementAxis::z(), MeasurementAxis::z()}), oracle, 1e-12);
  EXPECT_THROW(product_expectation(s, {MeasurementAxis::z()}), std::invalid_argument);
}

TEST(SequentialMeasureProb, OrderDependenceAtReferenceAngles) {
  const auto rho = DensityMatrix::maximally_mixed(2);
  const auto n1 = MeasurementAxis::z(), n2 = MeasurementAxis::xz(pi / 3), n3 = MeasurementAxis::xz(2 * pi / 3);
  const LocalOutcome forward[] = {{n1, Sign::plus}, {n2, Sign::minus}, {n3, Sign::minus}};
  const LocalOutcome swapped[] = {{n1, Sign::plus}, {n3, Sign::minus}, {n2, Sign::minus}};
  EXPECT_NEAR(sequential_measure_prob(rho, forward), 0.09375, 1e-12);
  EXPECT_NEAR(sequential_measure_prob(rho, swapped), 0.28125, 1e-12);
}

TEST(SequentialMeasureProb, EigenstateAndZeroBranch) {
  const auto up = DensityMatrix::from_pure(basis_state(1, 0));
  const LocalOutcome z_plus{MeasurementAxis::z(), Sign::plus};
  const LocalOutcome z_minus{MeasurementAxis::z(), Sign::minus};
  EXPECT_EQ(sequential_measure_prob(up, std::span(&z_plus, 1)), 1.0);
  const LocalOutcome impossible[] = {z_minus, {MeasurementAxis::x(), Sign::plus}};
  EXPECT_EQ(sequential_measure_prob(up, impossible), 0.0);
  EXPECT_THROW(sequential_measure_prob(DensityMatrix::maximally_mixed(4), {}), std::invalid_argument);
}

TEST(SequentialMeasureProb, CommutingAxesAreOrderIndependent) {
  const auto rho = DensityMatrix::maximally_mixed(2);
  const auto a = MeasurementAxis(0.8, 1.3);
  const auto b = MeasurementAxis(pi - 0.8, 1.3 + pi);  // antipodal, same eigenbasis
  const LocalOutcome ab[] = {{a, Sign::plus}, {b, Sign::minus}};
  const LocalOutcome ba[] = {{b, Sign::minus}, {a, Sign::plus}};
  EXPECT_NEAR(sequential_measure_prob(rho, ab), sequential_measure_prob(rho, ba), 1e-12);
  EXPECT_NEAR(sequential_measure_prob(rho, ab), 0.5, 1e-12);
}

TEST(MixedVsSuperposition, DistinguishableOffZ) {
  auto r = mixed_vs_superposition_report(MeasurementAxis::z());
  EXPECT_NEAR(r.mixed.plus, 0.5, 1e-12);
  EXPECT_NEAR(r.phi.plus, 0.5, 1e-12);
  r = mixed_vs_superposition_report(MeasurementAxis::x());
  EXPECT_NEAR(r.mixed.plus, 0.5, 1e-12);
  EXPECT_NEAR(r.phi.plus, 1.0, 1e-12);
  EXPECT_NEAR(r.phi.minus, 0.0, 1e-12);

  // |phi> has Bloch vector +x, so p+ = (1 + n.x) / 2
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto a = i == 0 ? MeasurementAxis::xz(pi / 3) : random_axis(rng);
    r = mixed_vs_superposition_report(a);
    const double oracle = 0.5 * (1.0 + std::sin(a.theta()) * std::cos(a.phi()));
    EXPECT_NEAR(r.phi.plus, oracle, 1e-12);
    EXPECT_NEAR(r.phi.plus + r.phi.minus, 1.0, 1e-12);
    EXPECT_NEAR(r.mixed.plus, 0.5, 1e-12);
  }
  EXPECT_NEAR(mixed_vs_superposition_report(MeasurementAxis::xz(pi / 3)).phi.plus, 0.5 + std::sqrt(3.0) / 4, 1e-12);
}
