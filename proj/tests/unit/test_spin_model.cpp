#include <cmath>

#include "floqspin/errors.hpp"
#include "floqspin/linalg.hpp"
#include "floqspin/spin_model.hpp"
#include "helpers.hpp"

namespace floqspin {
namespace {

using test::matrices_near;
constexpr double kMuB = units::kBohrMagneton;

TEST(SpinOperators, SpinOneMatchesPrintedMatrices) {
  const auto ops = build_spin_operators(1.0);
  ASSERT_EQ(ops.dim(), 3);
  CMatrix sz = CMatrix::Zero(3, 3);
  sz.diagonal() << 1.0, 0.0, -1.0;
  EXPECT_TRUE(matrices_near(ops.sz(), sz, 0.0));
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix sx(3, 3);
  sx << 0, r, 0, r, 0, r, 0, r, 0;
  EXPECT_TRUE(matrices_near(ops.sx(), sx, 1e-15));
  CMatrix sy(3, 3);
  sy << 0, -kI * r, 0, kI * r, 0, -kI * r, 0, kI * r, 0;
  EXPECT_TRUE(matrices_near(ops.sy(), sy, 1e-15));
}

TEST(SpinOperators, SpinHalfIsHalfPauli) {
  const auto ops = build_spin_operators(0.5);
  ASSERT_EQ(ops.dim(), 2);
  CMatrix sz(2, 2), sx(2, 2);
  sz << 0.5, 0, 0, -0.5;
  sx << 0, 0.5, 0.5, 0;
  EXPECT_TRUE(matrices_near(ops.sz(), sz, 1e-15));
  EXPECT_TRUE(matrices_near(ops.sx(), sx, 1e-15));
}

class SpinAlgebra : public ::testing::TestWithParam<double> {};

TEST_P(SpinAlgebra, CommutatorsCasimirHermiticity) {
  const double s = GetParam();
  const auto ops = build_spin_operators(s);
  ASSERT_EQ(ops.dim(), static_cast<Eigen::Index>(std::lround(2 * s + 1)));
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    EXPECT_TRUE(matrices_near(linalg::commutator(ops.s[a], ops.s[b]), kI * ops.s[c], 1e-12));
    EXPECT_LT(linalg::hermiticity_defect(ops.s[a]), 1e-15);
  }
  const CMatrix casimir = ops.sx() * ops.sx() + ops.sy() * ops.sy() + ops.sz() * ops.sz();
  EXPECT_TRUE(matrices_near(casimir, s * (s + 1) * CMatrix::Identity(ops.dim(), ops.dim()), 1e-12));
}

INSTANTIATE_TEST_SUITE_P(Spins, SpinAlgebra, ::testing::Values(0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 7.5));

TEST(SpinOperators, RejectsNonPhysicalSpin) {
  EXPECT_THROW(build_spin_operators(0.0), InvalidArgument);
  EXPECT_THROW(build_spin_operators(-1.0), InvalidArgument);
  EXPECT_THROW(build_spin_operators(0.3), InvalidArgument);
  EXPECT_THROW(build_spin_operators(std::nan("")), InvalidArgument);
}

TEST(StaticHamiltonian, ZeroFieldSplittingEntries) {
  const auto ops = build_spin_operators(1.0);
  StaticParams p;
  p.D = 5.0;
  p.E = 0.5;
  const CMatrix h = build_static_hamiltonian(p, ops);
  EXPECT_NEAR(h(0, 0).real(), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(h(1, 1).real(), -10.0 / 3.0, 1e-14);
  EXPECT_NEAR(h(2, 2).real(), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(std::abs(h(0, 2) - cplx(0.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(h(2, 0) - cplx(0.5)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(h(0, 1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(h(1, 2)), 0.0, 1e-14);
  EXPECT_LT(linalg::hermiticity_defect(h), 1e-12);
}

TEST(StaticHamiltonian, PureZeemanAlongZ) {
  const auto ops = build_spin_operators(1.0);
  StaticParams p;
  p.D = 0.0;
  p.E = 0.0;
  p.Bs = Vec3(0, 0, 100);
  CMatrix expected = CMatrix::Zero(3, 3);
  expected.diagonal() << 2 * kMuB * 100, 0, -2 * kMuB * 100;
  EXPECT_TRUE(matrices_near(build_static_hamiltonian(p, ops), expected, 1e-13));
}

TEST(StaticHamiltonian, AxialOnly) {
  const auto ops = build_spin_operators(1.0);
  StaticParams p;
  CMatrix expected = CMatrix::Zero(3, 3);
  expected.diagonal() << 5.0 / 3.0, -10.0 / 3.0, 5.0 / 3.0;
  EXPECT_TRUE(matrices_near(build_static_hamiltonian(p, ops), expected, 1e-14));
}

TEST(StaticHamiltonian, DimensionMismatchRejected) {
  StaticParams p;
  p.spin = 1.0;
  EXPECT_THROW(build_static_hamiltonian(p, build_spin_operators(1.5)), InvalidArgument);
}

TEST(StaticHamiltonian, ZeroFieldPartIsTraceless) {
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.5}) {
    const auto ops = build_spin_operators(s);
    for (auto [d, e] : {std::pair{5.0, 0.5}, std::pair{-3.0, 1.0}, std::pair{0.7, -0.2}}) {
      EXPECT_NEAR(std::abs(zero_field_hamiltonian(d, e, ops).trace()), 0.0, 1e-12) << "S=" << s;
    }
  }
}

TEST(StaticHamiltonian, AnisotropicGZeemanUsesTransposeContraction) {
  const auto ops = build_spin_operators(1.0);
  Mat3 g;
  g << 2.0, 0.1, 0.0, 0.0, 1.9, 0.2, 0.05, 0.0, 2.1;
  const Vec3 b(10, -20, 30);
  const Vec3 gb = g.transpose() * b;  // B^T g s = sum_j (g^T B)_j s_j
  CMatrix expected = CMatrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j) expected += kMuB * gb(j) * ops.s[j];
  EXPECT_TRUE(matrices_near(zeeman_operator(b, g, ops), expected, 1e-14));
  const auto d = zeeman_derivatives(g, ops);
  for (int a = 0; a < 3; ++a) {
    CMatrix da = CMatrix::Zero(3, 3);
    for (int j = 0; j < 3; ++j) da += kMuB * g(a, j) * ops.s[j];
    EXPECT_TRUE(matrices_near(d[a], da, 1e-15));
  }
}

TEST(SolveStatic, RhombicSpectrum) {
  StaticParams p;
  p.E = 0.5;
  const auto s = solve_static(p);
  ASSERT_EQ(s.energies.size(), 3);
  EXPECT_NEAR(s.energies(0), -10.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.energies(1), 7.0 / 6.0, 1e-12);
  EXPECT_NEAR(s.energies(2), 13.0 / 6.0, 1e-12);
}

TEST(SolveStatic, AxialDegenerateTop) {
  StaticParams p;
  const auto s = solve_static(p);
  EXPECT_NEAR(s.energies(0), -10.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.energies(1), 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.energies(2), 5.0 / 3.0, 1e-12);
}

TEST(SolveStatic, AxialZeemanSplitsTopPair) {
  for (double b : {1.0, 10.0, 50.0}) {
    StaticParams p;
    p.Bs = Vec3(0, 0, b);
    const auto s = solve_static(p);
    std::vector<double> expected{-10.0 / 3.0, 5.0 / 3.0 - 2 * kMuB * b, 5.0 / 3.0 + 2 * kMuB * b};
    std::sort(expected.begin(), expected.end());  // the lower Zeeman branch crosses below the ground level
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(s.energies(n), expected[n], 1e-12) << "b=" << b;
  }
}

TEST(SolveStatic, ResidualsAndOrthonormality) {
  std::mt19937_64 rng(7);
  const auto ops = build_spin_operators(1.0);
  for (int i = 0; i < 20; ++i) {
    StaticParams p;
    p.E = 0.3 * i / 20.0 * 5.0;
    p.Bs = test::random_vec(rng, 200.0);
    const auto s = solve_static(p);
    const CMatrix h = build_static_hamiltonian(p, ops);
    for (Eigen::Index n = 1; n < s.energies.size(); ++n) EXPECT_LE(s.energies(n - 1), s.energies(n));
    const CMatrix resid = h * s.states - s.states * s.energies.asDiagonal();
    EXPECT_LT(test::max_abs(resid), 1e-10);
    EXPECT_TRUE(matrices_near(s.states.adjoint() * s.states, CMatrix::Identity(3, 3), 1e-12));
  }
}

TEST(SolveStatic, FieldReversalPreservesSpectrum) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    StaticParams p;
    p.E = 0.7;
    Mat3 g = 2.0 * Mat3::Identity();
    g(0, 1) = g(1, 0) = 0.05 * i;
    p.g = g;
    p.Bs = test::random_vec(rng, 150.0);
    const auto a = solve_static(p);
    p.Bs = -p.Bs;
    const auto b = solve_static(p);
    EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SolveStatic, RhombicSignFlipSwapsXY) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) {
    const Vec3 b = test::random_vec(rng, 100.0);
    StaticParams p;
    p.E = 0.8;
    p.Bs = b;
    StaticParams q = p;
    q.E = -0.8;
    q.Bs = Vec3(b(1), b(0), b(2));
    EXPECT_LT((solve_static(p).energies - solve_static(q).energies).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(StaticParams, WarnsOutsideConventionalRange) {
  StaticParams p;
  p.E = 0.5;
  EXPECT_TRUE(p.warnings().empty());
  p.E = 2.0;  // > D/3
  EXPECT_FALSE(p.warnings().empty());
  EXPECT_NO_THROW(solve_static(p));
}

TEST(StaticParams, IsotropyCheck) {
  StaticParams p;
  EXPECT_TRUE(p.g_isotropic());
  p.g(2, 2) = 2.1;
  EXPECT_FALSE(p.g_isotropic());
}

}  // namespace
}  // namespace floqspin
