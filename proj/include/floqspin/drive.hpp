#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "floqspin/types.hpp"

namespace floqspin {

/// Real quadrature vectors of a monochromatic drive: B(t) = B_F [P_cos cos(Wt) + P_sin sin(Wt)].
struct Polarization {
  Vec3 cos = Vec3::Zero();
  Vec3 sin = Vec3::Zero();

  /// P^(+1) = (P_cos + i P_sin) / 2
  CVec3 plus() const;
  /// P^(-1) = (P_cos - i P_sin) / 2
  CVec3 minus() const;
};

/// Accepted names, in catalog order: x y z +x+y +x-y +x+z +x-z +y+z +y-z (xy)+ (xy)- (xz)+ (xz)- (yz)+ (yz)-
const std::vector<std::string>& polarization_names();
const std::vector<std::string>& linear_polarization_names();
const std::vector<std::string>& circular_polarization_names();

/// "(ab)+" rotates from e_a towards e_b: P_cos = e_a, P_sin = +e_b. Tilted linear names are unit
/// vectors (e_a +- e_b)/sqrt(2). Throws InvalidArgument for unknown names.
Polarization polarization_from_name(std::string_view name);

struct DriveSpec {
  double hbar_omega = 20.0;  // ueV
  double amplitude = 0.0;    // B_F, mT
  Polarization polarization;
};

/// Harmonic table B(t) = sum_m B^(m) exp(-i m W t), fields in mT.
class FourierField {
 public:
  FourierField() = default;

  /// Adds (or overwrites) harmonic m and its conjugate partner -m.
  void set_real_pair(int m, const CVec3& value);
  /// Raw insertion without enforcing the partner; used to build deliberately inconsistent tables.
  void set(int m, const CVec3& value);

  CVec3 harmonic(int m) const;
  const std::map<int, CVec3>& harmonics() const { return harmonics_; }
  bool empty() const { return harmonics_.empty(); }
  int max_order() const;

  /// B^(-m) == conj(B^(m)) for every stored m, to tol [mT].
  bool is_real(double tol = 1e-12) const;

  /// Build from the cos/sin series B(t) = B0 + sum_{m>=1} [Bcos_m cos(mWt) + Bsin_m sin(mWt)].
  static FourierField from_cos_sin(const Vec3& static_part, const std::map<int, std::pair<Vec3, Vec3>>& terms);

 private:
  std::map<int, CVec3> harmonics_;
};

/// Exactly the m = +-1 harmonics B_F P^(+-1); empty when B_F = 0.
FourierField to_fourier(const DriveSpec& d);

/// Inverse of the P^(+-1) split: recovers (P_cos, P_sin) from the m = +1 harmonic.
Polarization polarization_from_fourier(const FourierField& f, double amplitude);

/// Real field at time t [ns].
Vec3 field_at(const FourierField& f, double hbar_omega, double t);

}  // namespace floqspin
