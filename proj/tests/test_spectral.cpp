#include "beltrami/spectral.hpp"

#include <gtest/gtest.h>

using namespace beltrami;

namespace {

ResonanceProblem problem(int mode, int n = 50) { return {make_torus(2.0), mode, n, 1.0, SignConvention::variantA}; }

}  // namespace

TEST(Proxy, DiagonalMatrixAndSingularity) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(3, 3) * 2.0;
  const Eigen::VectorXcd e = Eigen::VectorXcd::Unit(3, 0);
  const ProxyValue p = proxy_f(A, e, e);
  EXPECT_FALSE(p.exact_singular);
  EXPECT_NEAR(std::abs(p.value - 2.0), 0.0, 1e-15);
  A(1, 1) = 0.0;
  EXPECT_TRUE(proxy_f(A, e, e).exact_singular);
  EXPECT_THROW(proxy_f(A, Eigen::VectorXcd::Ones(2), e), std::invalid_argument);
}

TEST(Proxy, ProbesAreDeterministicUnitVectors) {
  const ProbeVectors a = probe_vectors(51, 7), b = probe_vectors(51, 7), c = probe_vectors(51, 8);
  EXPECT_EQ((a.r1 - b.r1).norm() + (a.r2 - b.r2).norm(), 0.0);
  EXPECT_GT((a.r1 - c.r1).norm(), 0.1);
  EXPECT_NEAR(a.r1.norm(), 1.0, 1e-14);
  EXPECT_NEAR(a.r2.norm(), 1.0, 1e-14);
}

TEST(Muller, PolynomialRoots) {
  const MullerResult r = muller_find([](cplx z) { return z * z + 1.0; }, 0.5, 1.0, 1.5);
  EXPECT_NEAR(std::abs(r.root.real()), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.root.imag()), 1.0, 1e-12);
  const MullerResult c = muller_find([](cplx z) { return z * z * z - 1.0; }, 0.8, 0.9, 1.2);
  EXPECT_NEAR(std::abs(c.root - 1.0), 0.0, 1e-12);
  EXPECT_THROW(muller_find([](cplx z) { return z; }, 1.0, 1.0, 2.0), std::invalid_argument);
}

TEST(Muller, ReportsBestIterateOnFailure) {
  try {
    muller_find([](cplx z) { return std::exp(z); }, 0.0, 1.0, 2.0, 1e-14, 5);
    FAIL() << "exp has no root";
  } catch (const MullerError& e) {
    EXPECT_LT(std::abs(e.best().value), 1.0);
  }
}

TEST(Muller, TorusModeZeroResonance) {
  const ResonanceRecord r = refine_resonance(problem(0), 3.60, 3.64, 3.68);
  EXPECT_NEAR(r.k.real(), 3.6507029167, 1e-8);
  EXPECT_LT(std::abs(r.k.imag()), 1e-10);
  EXPECT_EQ(r.nullity, 1);
  EXPECT_LT(r.residual, 1e-10);
  EXPECT_EQ(r.mode, 0);
  EXPECT_EQ(r.n, 50);
}

TEST(Condition, Examples) {
  EXPECT_DOUBLE_EQ(condition_number(Eigen::MatrixXcd::Identity(4, 4)), 1.0);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 10.0;
  D(1, 1) = 0.1;
  EXPECT_NEAR(condition_number(D), 100.0, 1e-12);
  D(1, 1) = 0.0;
  EXPECT_TRUE(std::isinf(condition_number(D)));
}

TEST(NullSpaceTest, RankDeficientMatrix) {
  Eigen::MatrixXcd A(3, 3);
  A << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  const NullSpace ns = null_space(A);
  ASSERT_EQ(ns.nullity, 1);
  EXPECT_LT((A * ns.vectors[0]).norm(), 1e-12);
  EXPECT_EQ(null_space(Eigen::MatrixXcd::Identity(3, 3)).nullity, 0);
  EXPECT_EQ(null_space(Eigen::MatrixXcd::Zero(2, 2)).nullity, 2);
}

TEST(Peaks, SyntheticSweep) {
  std::vector<SweepSample> s;
  for (int i = 0; i < 21; ++i) {
    SweepSample x;
    x.k = 1.0 + 0.1 * i;
    x.kappa = 1.0 + (i == 7 ? 1e6 : 0.0) + (i == 15 ? 5.0 : 0.0);
    s.push_back(x);
  }
  const auto p = detect_peaks(s);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], 7u);
  EXPECT_TRUE(detect_peaks({s[0], s[1]}).empty());
}

TEST(Grid, InclusiveEndpoints) {
  EXPECT_EQ(k_grid(3.5, 4.1, 0.01).size(), 61u);
  EXPECT_TRUE(k_grid(2.0, 1.0, 0.1).empty());
  EXPECT_THROW(k_grid(1.0, 2.0, 0.0), std::invalid_argument);
}

TEST(Sweep, RejectsUnsortedOrNonPositive) {
  EXPECT_THROW(condition_sweep(problem(1, 16), {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(condition_sweep(problem(1, 16), {0.0}), std::invalid_argument);
}

TEST(Find, EmptyBracketWithoutResonances) {
  EXPECT_TRUE(find_resonances(problem(0), 2.0, 2.5).empty());
  EXPECT_THROW(find_resonances(problem(0), 2.5, 2.0), std::invalid_argument);
}

TEST(Find, ModeOneDeterministicAndPeaksNearRoots) {
  const auto a = find_resonances(problem(1), 3.3, 3.9);
  const auto b = find_resonances(problem(1), 3.3, 3.9);
  ASSERT_EQ(a.size(), 2u);
  ASSERT_EQ(b.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].k, b[i].k);
  EXPECT_NEAR(a[0].k.real(), 3.3392101821, 1e-8);
  EXPECT_NEAR(a[1].k.real(), 3.8476759977, 1e-8);

  const auto sweep = condition_sweep(problem(1), k_grid(3.3, 3.9, 0.01));
  for (std::size_t idx : detect_peaks(sweep)) {
    const double kp = sweep[idx].k.real();
    EXPECT_TRUE(std::abs(kp - a[0].k.real()) < 0.01 || std::abs(kp - a[1].k.real()) < 0.01) << kp;
  }
}

TEST(Find, ComplexRootsAreDiscarded) {
  // mode 0 has a kappa peak near 2.37 whose proxy root is off the real axis
  FindOptions opt;
  opt.k_step = 0.01;
  const auto real = find_resonances(problem(0), 2.0, 3.0, 10, opt);
  opt.imag_tol = 1.0;
  const auto all = find_resonances(problem(0), 2.0, 3.0, 10, opt);
  EXPECT_TRUE(real.empty());
  bool complex_seen = false;
  for (const auto& r : all) complex_seen |= std::abs(r.k.imag()) > 1e-3;
  EXPECT_TRUE(complex_seen);
}
