#include "oceancast/geometry.hpp"

#include <algorithm>

namespace ocean {

UnitVec3 rotate_to_pole_frame(const UnitVec3& receiver, const UnitVec3& p) {
  // Rz(-lon) then Ry(-colat): the receiver lands exactly on (0, 0, 1).
  const double lon = longitude_rad(receiver);
  const double cl = std::cos(lon), sl = std::sin(lon);
  const double px = p.x * cl + p.y * sl;
  const double py = -p.x * sl + p.y * cl;
  const double pz = p.z;

  const double zr = std::clamp(receiver.z, -1.0, 1.0);
  const double ct = zr;                        // cos(colat)
  const double st = std::sqrt(1.0 - zr * zr);  // sin(colat), >= 0
  return {px * ct - pz * st, py, px * st + pz * ct};
}

std::array<double, 4> local_edge_features(const UnitVec3& sender, const UnitVec3& receiver) {
  const UnitVec3 s = rotate_to_pole_frame(receiver, sender);
  return {geodesic_distance(sender, receiver), s.x, s.y, s.z};
}

double spherical_triangle_area(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c) {
  const double la = geodesic_distance(b, c);
  const double lb = geodesic_distance(c, a);
  const double lc = geodesic_distance(a, b);
  const double s = 0.5 * (la + lb + lc);
  const double t = std::tan(s / 2) * std::tan((s - la) / 2) * std::tan((s - lb) / 2) *
                   std::tan((s - lc) / 2);
  return 4.0 * std::atan(std::sqrt(std::max(t, 0.0)));
}

}  // namespace ocean
