#include <cmath>

#include "floqspin/errors.hpp"
#include "floqspin/optimize.hpp"
#include "helpers.hpp"

namespace floqspin {
namespace {

constexpr double kW = 20.0;

StaticParams rhombic(double e_over_d = 0.1) {
  StaticParams p;
  p.E = e_over_d * p.D;
  return p;
}

struct Reference {
  CMatrix states;
  RVector energies;
};

Reference undriven_reference(const StaticParams& p) {
  const auto sol = solve_floquet(p, FourierField{}, kW);
  const auto sel = select_physical_replicas(sol, solve_static(p).energies);
  Reference r{CMatrix(sol.states.rows(), 3), RVector(3)};
  for (int n = 0; n < 3; ++n) {
    r.states.col(n) = sol.states.col(sel.indices[n]);
    r.energies(n) = sol.quasienergies(sel.indices[n]);
  }
  return r;
}

TEST(SmfsSearch, UndrivenOptimumIsZeroField) {
  for (double eod : {0.1, 1.0 / 3.0}) {
    const auto p = rhombic(eod);
    const auto ref = undriven_reference(p);
    const auto r = smfs_search(p, FourierField{}, kW, Vec3::Zero(), ref.states, ref.energies);
    EXPECT_EQ(r.bs_opt, Vec3::Zero()) << eod;
    EXPECT_LT(r.theta, 1e-12) << eod;
    for (const auto& f : r.smfs_flags) EXPECT_TRUE(f[2]);
  }
}

TEST(SmfsSearch, AxialUndrivenDoubletHasNoStablePoint) {
  // E = 0: the top pair splits linearly in Bs_z, so Theta stays finite near the origin
  const auto p = rhombic(0.0);
  const auto ref = undriven_reference(p);
  const auto r = smfs_search(p, FourierField{}, kW, Vec3::Zero(), ref.states, ref.energies);
  EXPECT_GT(r.theta, 1e-12);
  EXPECT_LT(r.bs_opt.norm(), 1e-2);
  EXPECT_TRUE(r.smfs_flags[0][0]);
}

TEST(SmfsSearch, LinearDriveKeepsZeroField) {
  const auto p = rhombic();
  const auto pol = polarization_from_name("+x+z");
  const auto lv = continued_levels(p, pol, kW, 100.0);
  const auto r = smfs_search(p, to_fourier(DriveSpec{kW, 100.0, pol}), kW, Vec3::Zero(), lv.states, lv.energies);
  EXPECT_LT(r.bs_opt.norm(), 1e-12);
  for (double m : r.magnitudes) EXPECT_LT(m, 1e-9);
}

TEST(SmfsSearch, ObjectiveBookkeeping) {
  const auto p = rhombic();
  const auto pol = polarization_from_name("(xy)+");
  const auto lv = continued_levels(p, pol, kW, 40.0);
  const auto r = smfs_search(p, to_fourier(DriveSpec{kW, 40.0, pol}), kW, Vec3::Zero(), lv.states, lv.energies);
  double sum = 0.0;
  for (std::size_t n = 0; n < r.gradients.size(); ++n) {
    EXPECT_NEAR(r.magnitudes[n], r.gradients[n].norm(), 1e-15);
    for (std::size_t k = 0; k < kSmfsCutoffs.size(); ++k) {
      EXPECT_EQ(r.smfs_flags[n][k], r.magnitudes[n] < kSmfsCutoffs[k]);
    }
    sum += r.magnitudes[n];
  }
  EXPECT_NEAR(r.theta, sum, 1e-15);
  ASSERT_FALSE(r.theta_history.empty());
  for (std::size_t i = 1; i < r.theta_history.size(); ++i) EXPECT_LE(r.theta_history[i], r.theta_history[i - 1]);
  for (std::size_t i = 1; i < r.spacing_history.size(); ++i) {
    EXPECT_LT(r.spacing_history[i], r.spacing_history[i - 1]);
  }
  EXPECT_DOUBLE_EQ(r.spacing_history.front(), 0.1);
  EXPECT_TRUE(r.final_spacing < 1e-5 || r.theta < 1e-12);
  EXPECT_GT(r.bs_opt.norm(), 0.1);  // circular drives need a compensating field
  EXPECT_LT(std::abs(r.bs_opt(0)) + std::abs(r.bs_opt(1)), 0.5);
}

TEST(SmfsSearch, RejectsBadSettings) {
  const auto p = rhombic();
  const auto ref = undriven_reference(p);
  SmfsSettings s;
  s.shrink_factor = 1.0;
  EXPECT_THROW(smfs_search(p, FourierField{}, kW, Vec3::Zero(), ref.states, ref.energies, s), InvalidArgument);
  CMatrix wrong = CMatrix::Zero(9, 3);
  EXPECT_THROW(smfs_search(p, FourierField{}, kW, Vec3::Zero(), wrong, ref.energies), InvalidArgument);
}

TEST(SmfsSweep, HandednessAntisymmetry) {
  const auto p = rhombic();
  const std::vector<double> grid{0.0, 30.0, 60.0};
  const auto plus = smfs_sweep(p, polarization_from_name("(yz)+"), kW, grid, {}, 5.0);
  const auto minus = smfs_sweep(p, polarization_from_name("(yz)-"), kW, grid, {}, 5.0);
  ASSERT_EQ(plus.size(), 3u);
  EXPECT_EQ(plus[0].bs_opt, Vec3::Zero());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_LT((plus[i].bs_opt + minus[i].bs_opt).norm(), 0.1) << grid[i];
    EXPECT_LT(std::abs(plus[i].bs_opt(1)) + std::abs(plus[i].bs_opt(2)), 0.5) << grid[i];
    EXPECT_GT(std::abs(plus[i].bs_opt(0)), 1.0) << grid[i];
  }
}

TEST(SmfsSweep, ObserverAndGridValidation) {
  std::vector<std::size_t> seen;
  const auto out = smfs_sweep(rhombic(), polarization_from_name("x"), kW, {0.0, 10.0}, {}, 5.0,
                              [&](std::size_t i, const SmfsResult&) { seen.push_back(i); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(smfs_sweep(rhombic(), polarization_from_name("x"), kW, {}, {}), InvalidArgument);
  EXPECT_THROW(smfs_sweep(rhombic(), polarization_from_name("x"), kW, {0.0, 5.0, 4.0}, {}), InvalidArgument);
  EXPECT_THROW(smfs_sweep(rhombic(), polarization_from_name("x"), kW, {0.0, 5.0}, {}, 0.0), InvalidArgument);
}

TEST(Cancellation, UndrivenConvergesImmediately) {
  const auto r = cancellation_solve(rhombic(), FourierField{}, kW, Vec3::Zero());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 1);
  EXPECT_LT(r.bs_opt.norm(), 1e-12);
  EXPECT_LT(r.residual, 1e-4);
}

TEST(Cancellation, FixedPointIsStable) {
  const auto p = rhombic();
  const auto f = to_fourier(DriveSpec{kW, 80.0, polarization_from_name("(xz)-")});
  const auto first = cancellation_solve(p, f, kW, Vec3::Zero());
  ASSERT_TRUE(first.converged);
  EXPECT_LT(first.residual, 1e-4);
  const auto again = cancellation_solve(p, f, kW, first.bs_opt);
  EXPECT_TRUE(again.converged);
  EXPECT_LT((again.bs_opt - first.bs_opt).norm(), 1e-4);
  EXPECT_LE(again.iterations, 1);
}

TEST(Cancellation, LinearDriveNeedsOnlyFewMillitesla) {
  const auto p = rhombic();
  for (const char* n : {"x", "+x+z", "+y-z"}) {
    const auto f = to_fourier(DriveSpec{kW, 150.0, polarization_from_name(n)});
    const auto r = cancellation_solve(p, f, kW, Vec3::Zero());
    ASSERT_TRUE(r.converged) << n;
    EXPECT_LT(r.bs_opt.cwiseAbs().maxCoeff(), 5.0) << n;
    const auto c = *r.h_eff.coefficients;
    const auto field = extract_cancellation_field(c[6], c[7], c[8], p.g);
    EXPECT_LT(field.script_b.norm(), 1e-4) << n;
  }
}

TEST(Cancellation, IterationCapAndErrors) {
  const auto p = rhombic();
  const auto f = to_fourier(DriveSpec{kW, 80.0, polarization_from_name("(xy)+")});
  CancellationSettings s;
  s.max_iterations = 2;
  const auto r = cancellation_solve(p, f, kW, Vec3::Zero(), s);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_EQ(r.residual_trace.size(), 3u);
  s.max_iterations = 0;
  EXPECT_THROW(cancellation_solve(p, f, kW, Vec3::Zero(), s), InvalidArgument);
  StaticParams half;
  half.spin = 1.5;
  EXPECT_THROW(cancellation_solve(half, f, kW, Vec3::Zero()), UnsupportedSpin);
}

TEST(Cancellation, DivergenceIsReportedWithTrace) {
  // A huge Zeeman response per iteration: pushing Bs far outside the basin makes the plain update overshoot
  const auto p = rhombic();
  const auto f = to_fourier(DriveSpec{kW, 250.0, polarization_from_name("(xz)+")});
  CancellationSettings s;
  s.divergence_factor = 1.0 + 1e-9;
  s.divergence_window = 1;
  try {
    cancellation_solve(p, f, kW, Vec3(0, 2000, 0), s);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(CancellationSweep, WarmStartsAlongGrid) {
  const auto out = cancellation_sweep(rhombic(), polarization_from_name("y"), kW, {0.0, 50.0, 100.0}, {}, 10.0);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& r : out) {
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.bs_opt.cwiseAbs().maxCoeff(), 5.0);
  }
}

TEST(EnergySweep, UndrivenSlopesVanishAtCentre) {
  const auto p = rhombic();
  const auto ref = undriven_reference(p);
  for (int axis = 0; axis < 3; ++axis) {
    const auto s = energy_sweep(p, FourierField{}, kW, Vec3::Zero(), axis, 1.0, 0.25, ref.states, ref.energies);
    ASSERT_EQ(s.offsets.size(), 9u);
    EXPECT_DOUBLE_EQ(s.offsets.front(), -1.0);
    EXPECT_DOUBLE_EQ(s.offsets.back(), 1.0);
    const auto& centre = s.gradients[4];
    for (const auto& g : centre) EXPECT_LT(g.norm(), 1e-12);
    for (std::size_t i = 1; i < s.offsets.size(); ++i) EXPECT_GT(s.offsets[i], s.offsets[i - 1]);
  }
}

TEST(EnergySweep, LabelsFollowStatesAcrossTheSweep) {
  auto p = rhombic();
  const auto ref = undriven_reference(p);
  const auto s = energy_sweep(p, FourierField{}, kW, Vec3::Zero(), 2, 10.0, 0.5, ref.states, ref.energies);
  // the |0> level is field independent along z for S = 1; the other two move symmetrically
  for (const auto& e : s.energies) EXPECT_NEAR(e(0), -10.0 / 3.0, 1e-12);
  for (std::size_t i = 0; i < s.offsets.size(); ++i) {
    const std::size_t j = s.offsets.size() - 1 - i;
    EXPECT_NEAR(s.energies[i](1), s.energies[j](1), 1e-12);
  }
}

TEST(EnergySweep, Errors) {
  const auto p = rhombic();
  const auto ref = undriven_reference(p);
  EXPECT_THROW(energy_sweep(p, FourierField{}, kW, Vec3::Zero(), 3, 1.0, 0.1, ref.states, ref.energies),
               InvalidArgument);
  EXPECT_THROW(energy_sweep(p, FourierField{}, kW, Vec3::Zero(), 0, 1.0, 0.0, ref.states, ref.energies),
               InvalidArgument);
  EXPECT_EQ(axis_from_name('x'), 0);
  EXPECT_EQ(axis_from_name('z'), 2);
  EXPECT_THROW(axis_from_name('w'), InvalidArgument);
}

}  // namespace
}  // namespace floqspin
