#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace ocean {

// Point on the unit sphere. All geometry is double precision; midpoint
// projection at deep refinement levels is not reliable in single precision.
struct UnitVec3 {
  double x = 0.0, y = 0.0, z = 1.0;

  double dot(const UnitVec3& o) const { return x * o.x + y * o.y + z * o.z; }
  UnitVec3 cross(const UnitVec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline UnitVec3 normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  return {x / n, y / n, z / n};
}

inline UnitVec3 from_lat_lon_deg(double lat_deg, double lon_deg) {
  const double lat = lat_deg * M_PI / 180.0;
  const double lon = lon_deg * M_PI / 180.0;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

inline double latitude_rad(const UnitVec3& p) { return std::asin(std::clamp(p.z, -1.0, 1.0)); }
inline double longitude_rad(const UnitVec3& p) { return std::atan2(p.y, p.x); }

// Arc length between two unit vectors, in [0, pi]. The two-argument
// arctangent form is stable for both nearly-identical and nearly-antipodal
// inputs, unlike acos(dot).
inline double geodesic_distance(const UnitVec3& a, const UnitVec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Scalar triple product det[a b c]; positive when c is on the
// counter-clockwise side of the great-circle plane through a, b.
inline double signed_volume(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c) {
  return a.cross(b).dot(c);
}

// Edge feature vector [arc length, dx, dy, dz]: the sender's position in the
// receiver's local frame. The frame rotates the receiver to the north pole in
// two steps, azimuthal (undo receiver longitude) then polar (undo receiver
// colatitude), so features depend only on arc length and bearing and are
// invariant under a common rotation of both endpoints about the pole axis.
std::array<double, 4> local_edge_features(const UnitVec3& sender, const UnitVec3& receiver);

// Rotation underlying local_edge_features, exposed for tests.
UnitVec3 rotate_to_pole_frame(const UnitVec3& receiver, const UnitVec3& p);

// Area of the spherical triangle with the given vertices (l'Huilier).
double spherical_triangle_area(const UnitVec3& a, const UnitVec3& b, const UnitVec3& c);

}  // namespace ocean
