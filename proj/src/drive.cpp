#include "floqspin/drive.hpp"

#include <cmath>
#include <numbers>

#include "floqspin/errors.hpp"

namespace floqspin {

CVec3 Polarization::plus() const { return 0.5 * (cos.cast<cplx>() + kI * sin.cast<cplx>()); }
CVec3 Polarization::minus() const { return 0.5 * (cos.cast<cplx>() - kI * sin.cast<cplx>()); }

const std::vector<std::string>& linear_polarization_names() {
  static const std::vector<std::string> names{"x", "y", "z", "+x+y", "+x-y", "+x+z", "+x-z", "+y+z", "+y-z"};
  return names;
}

const std::vector<std::string>& circular_polarization_names() {
  static const std::vector<std::string> names{"(xy)+", "(xy)-", "(xz)+", "(xz)-", "(yz)+", "(yz)-"};
  return names;
}

const std::vector<std::string>& polarization_names() {
  static const std::vector<std::string> names = [] {
    auto all = linear_polarization_names();
    const auto& circ = circular_polarization_names();
    all.insert(all.end(), circ.begin(), circ.end());
    return all;
  }();
  return names;
}

namespace {

int axis_index(char c) {
  switch (c) {
    case 'x': return 0;
    case 'y': return 1;
    case 'z': return 2;
    default: return -1;
  }
}

Vec3 unit(int axis) { return Vec3::Unit(axis); }

[[noreturn]] void unknown(std::string_view name) {
  throw InvalidArgument("unknown polarization name '" + std::string(name) + "'");
}

}  // namespace

Polarization polarization_from_name(std::string_view name) {
  Polarization p;
  if (name.size() == 1) {
    const int a = axis_index(name[0]);
    if (a < 0) unknown(name);
    p.cos = unit(a);
    return p;
  }
  // +a+b / +a-b
  if (name.size() == 4 && name[0] == '+' && (name[2] == '+' || name[2] == '-')) {
    const int a = axis_index(name[1]);
    const int b = axis_index(name[3]);
    if (a < 0 || b < 0 || a >= b) unknown(name);
    const double sign = name[2] == '+' ? 1.0 : -1.0;
    p.cos = (unit(a) + sign * unit(b)) / std::numbers::sqrt2;
    return p;
  }
  // (ab)+ / (ab)-
  if (name.size() == 5 && name[0] == '(' && name[3] == ')' && (name[4] == '+' || name[4] == '-')) {
    const int a = axis_index(name[1]);
    const int b = axis_index(name[2]);
    if (a < 0 || b < 0 || a >= b) unknown(name);
    p.cos = unit(a);
    p.sin = (name[4] == '+' ? 1.0 : -1.0) * unit(b);
    return p;
  }
  unknown(name);
}

void FourierField::set_real_pair(int m, const CVec3& value) {
  if (m == 0) {
    harmonics_[0] = CVec3(value.real().cast<cplx>());
    return;
  }
  harmonics_[m] = value;
  harmonics_[-m] = value.conjugate();
}

void FourierField::set(int m, const CVec3& value) { harmonics_[m] = value; }

CVec3 FourierField::harmonic(int m) const {
  const auto it = harmonics_.find(m);
  return it == harmonics_.end() ? CVec3::Zero() : it->second;
}

int FourierField::max_order() const {
  int out = 0;
  for (const auto& [m, _] : harmonics_) out = std::max(out, std::abs(m));
  return out;
}

bool FourierField::is_real(double tol) const {
  for (const auto& [m, value] : harmonics_) {
    if ((harmonic(-m) - value.conjugate()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

FourierField FourierField::from_cos_sin(const Vec3& static_part, const std::map<int, std::pair<Vec3, Vec3>>& terms) {
  FourierField f;
  if (!static_part.isZero(0.0)) f.set_real_pair(0, static_part.cast<cplx>());
  for (const auto& [m, cs] : terms) {
    if (m <= 0) throw InvalidArgument("cos/sin harmonics must have order m >= 1");
    if (cs.first.isZero(0.0) && cs.second.isZero(0.0)) continue;
    f.set_real_pair(m, 0.5 * (cs.first.cast<cplx>() + kI * cs.second.cast<cplx>()));
  }
  return f;
}

FourierField to_fourier(const DriveSpec& d) {
  FourierField f;
  if (d.amplitude == 0.0) return f;
  f.set(1, d.amplitude * d.polarization.plus());
  f.set(-1, d.amplitude * d.polarization.minus());
  return f;
}

Polarization polarization_from_fourier(const FourierField& f, double amplitude) {
  Polarization p;
  if (amplitude == 0.0) return p;
  const CVec3 plus = f.harmonic(1) / amplitude;
  p.cos = 2.0 * plus.real();
  p.sin = 2.0 * plus.imag();
  return p;
}

Vec3 field_at(const FourierField& f, double hbar_omega, double t) {
  const double omega = hbar_omega / units::kHbar;  // rad / ns
  CVec3 acc = CVec3::Zero();
  for (const auto& [m, value] : f.harmonics()) acc += value * std::exp(-kI * (m * omega * t));
  return acc.real();
}

}  // namespace floqspin
