#include <cmath>
#include <numbers>

#include "floqspin/drive.hpp"
#include "floqspin/errors.hpp"
#include "helpers.hpp"

namespace floqspin {
namespace {

constexpr double kW = 20.0;

TEST(Polarization, PrincipalAxis) {
  const auto p = polarization_from_name("z");
  EXPECT_EQ(p.cos, Vec3(0, 0, 1));
  EXPECT_EQ(p.sin, Vec3::Zero());
}

TEST(Polarization, TiltedIsNormalized) {
  const auto p = polarization_from_name("+x+y");
  EXPECT_NEAR((p.cos - Vec3(1, 1, 0) / std::sqrt(2.0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(p.sin, Vec3::Zero());
  const auto q = polarization_from_name("+y-z");
  EXPECT_NEAR((q.cos - Vec3(0, 1, -1) / std::sqrt(2.0)).norm(), 0.0, 1e-15);
}

TEST(Polarization, CatalogShapes) {
  ASSERT_EQ(polarization_names().size(), 15u);
  ASSERT_EQ(linear_polarization_names().size(), 9u);
  ASSERT_EQ(circular_polarization_names().size(), 6u);
  for (const auto& n : linear_polarization_names()) {
    const auto p = polarization_from_name(n);
    EXPECT_NEAR(p.cos.norm(), 1.0, 1e-15) << n;
    EXPECT_EQ(p.sin, Vec3::Zero()) << n;
  }
  for (const auto& n : circular_polarization_names()) {
    const auto p = polarization_from_name(n);
    EXPECT_NEAR(p.cos.norm(), 1.0, 1e-15) << n;
    EXPECT_NEAR(p.sin.norm(), 1.0, 1e-15) << n;
    EXPECT_NEAR(p.cos.dot(p.sin), 0.0, 1e-15) << n;
  }
}

TEST(Polarization, CircularHandedness) {
  // "+" rotates counter-clockwise seen from the positive third axis: (B(0) x dB/dt) points along it.
  const std::map<std::string, Vec3> normal = {{"(xy)", Vec3(0, 0, 1)}, {"(xz)", Vec3(0, -1, 0)},
                                              {"(yz)", Vec3(1, 0, 0)}};
  for (const auto& [stem, axis] : normal) {
    const auto plus = polarization_from_name(stem + "+");
    const auto minus = polarization_from_name(stem + "-");
    // dB/dt at t=0 is proportional to P_sin.
    EXPECT_NEAR(plus.cos.cross(plus.sin).dot(axis), 1.0, 1e-15) << stem;
    EXPECT_NEAR(minus.cos.cross(minus.sin).dot(axis), -1.0, 1e-15) << stem;
  }
  const auto xy = polarization_from_name("(xy)+");
  EXPECT_EQ(xy.cos, Vec3(1, 0, 0));
  EXPECT_EQ(xy.sin, Vec3(0, 1, 0));
}

TEST(Polarization, UnknownNameRejected) {
  EXPECT_THROW(polarization_from_name("w"), InvalidArgument);
  EXPECT_THROW(polarization_from_name("(xx)+"), InvalidArgument);
  EXPECT_THROW(polarization_from_name(""), InvalidArgument);
  EXPECT_THROW(polarization_from_name("X"), InvalidArgument);
}

TEST(ToFourier, LinearCosineSplit) {
  const auto f = to_fourier(DriveSpec{kW, 100.0, polarization_from_name("x")});
  ASSERT_EQ(f.harmonics().size(), 2u);
  EXPECT_NEAR((f.harmonic(1) - CVec3(50, 0, 0)).norm(), 0.0, 1e-13);
  EXPECT_NEAR((f.harmonic(-1) - CVec3(50, 0, 0)).norm(), 0.0, 1e-13);
  EXPECT_TRUE(f.is_real());
}

TEST(ToFourier, CircularHarmonic) {
  const auto f = to_fourier(DriveSpec{kW, 100.0, polarization_from_name("(xy)+")});
  EXPECT_NEAR((f.harmonic(1) - CVec3(50, cplx(0, 50), 0)).norm(), 0.0, 1e-13);
  EXPECT_NEAR((f.harmonic(-1) - CVec3(50, cplx(0, -50), 0)).norm(), 0.0, 1e-13);
  EXPECT_EQ(f.max_order(), 1);
}

TEST(ToFourier, ZeroAmplitudeIsEmpty) {
  for (const auto& n : polarization_names()) {
    EXPECT_TRUE(to_fourier(DriveSpec{kW, 0.0, polarization_from_name(n)}).empty()) << n;
  }
}

TEST(ToFourier, RoundTripRecoversQuadratures) {
  for (const auto& n : polarization_names()) {
    const auto p = polarization_from_name(n);
    const auto back = polarization_from_fourier(to_fourier(DriveSpec{kW, 73.0, p}), 73.0);
    EXPECT_NEAR((back.cos - p.cos).norm(), 0.0, 1e-15) << n;
    EXPECT_NEAR((back.sin - p.sin).norm(), 0.0, 1e-15) << n;
  }
}

TEST(FieldAt, Examples) {
  const double t = drive_period(kW);
  EXPECT_NEAR(t, 2 * std::numbers::pi * units::kHbar / kW, 1e-15);
  const auto fx = to_fourier(DriveSpec{kW, 100.0, polarization_from_name("x")});
  EXPECT_NEAR((field_at(fx, kW, 0.0) - Vec3(100, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(field_at(fx, kW, t / 4).norm(), 0.0, 1e-12);
  const auto fxz = to_fourier(DriveSpec{kW, 125.0, polarization_from_name("(xz)+")});
  EXPECT_NEAR((field_at(fxz, kW, t / 4) - Vec3(0, 0, 125)).norm(), 0.0, 1e-12);
}

TEST(FieldAt, MatchesQuadratureFormAndIsPeriodic) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-50.0, 50.0);
  const double w = kW / units::kHbar;
  const double period = drive_period(kW);
  for (const auto& n : polarization_names()) {
    const auto p = polarization_from_name(n);
    const auto f = to_fourier(DriveSpec{kW, 80.0, p});
    for (int i = 0; i < 100; ++i) {
      const double t = ut(rng);
      const Vec3 direct = 80.0 * (p.cos * std::cos(w * t) + p.sin * std::sin(w * t));
      EXPECT_NEAR((field_at(f, kW, t) - direct).norm(), 0.0, 1e-12);
      EXPECT_NEAR((field_at(f, kW, t + period) - field_at(f, kW, t)).norm(), 0.0, 1e-9);  // phase rounding at |w t| ~ 1e3
    }
  }
}

TEST(FourierField, CosSinSeriesAndRealityCheck) {
  const Vec3 b0(1, 2, 3);
  const std::map<int, std::pair<Vec3, Vec3>> terms = {{1, {Vec3(10, 0, 0), Vec3(0, 5, 0)}},
                                                      {2, {Vec3(0, 0, 4), Vec3(1, 0, 0)}}};
  const auto f = FourierField::from_cos_sin(b0, terms);
  EXPECT_TRUE(f.is_real());
  EXPECT_EQ(f.max_order(), 2);
  const double w = kW / units::kHbar;
  for (double t : {0.0, 0.013, 0.07, 0.11}) {
    Vec3 direct = b0;
    for (const auto& [m, cs] : terms) direct += cs.first * std::cos(m * w * t) + cs.second * std::sin(m * w * t);
    EXPECT_NEAR((field_at(f, kW, t) - direct).norm(), 0.0, 1e-12);
  }
  FourierField bad;
  bad.set(1, CVec3(1, 0, 0));
  EXPECT_FALSE(bad.is_real());
  EXPECT_THROW(FourierField::from_cos_sin(b0, {{0, {Vec3::Zero(), Vec3::Zero()}}}), InvalidArgument);
}

TEST(FourierField, PairSetterKeepsConjugatePartner) {
  FourierField f;
  f.set_real_pair(3, CVec3(cplx(1, 2), 0, cplx(0, -1)));
  EXPECT_TRUE(f.is_real());
  EXPECT_NEAR((f.harmonic(-3) - f.harmonic(3).conjugate()).norm(), 0.0, 0.0);
  EXPECT_EQ(f.harmonic(2), CVec3::Zero());
}

}  // namespace
}  // namespace floqspin
