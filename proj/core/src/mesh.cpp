#include "oceancast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "oceancast/binio.hpp"
#include "oceancast/common.hpp"

namespace ocean {

namespace {

void rebuild_edges(TriMesh& mesh) {
  mesh.edges.clear();
  mesh.edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      mesh.edges.emplace_back(t[k], t[(k + 1) % 3]);
      mesh.edges.emplace_back(t[(k + 1) % 3], t[k]);
    }
  }
  std::sort(mesh.edges.begin(), mesh.edges.end());
  mesh.edges.erase(std::unique(mesh.edges.begin(), mesh.edges.end()), mesh.edges.end());
}

// Flip any triangle whose vertex order is clockwise seen from outside.
void orient_outward(TriMesh& mesh) {
  for (auto& t : mesh.triangles) {
    if (signed_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]) < 0.0)
      std::swap(t[1], t[2]);
  }
}

}  // namespace

TriMesh base_icosahedron() {
  TriMesh mesh;
  mesh.level = 0;
  mesh.nodes.reserve(12);
  mesh.nodes.push_back({0.0, 0.0, 1.0});
  const double ring_lat = std::atan(0.5) * 180.0 / M_PI;
  for (int i = 0; i < 5; ++i)  // upper ring, longitudes 0, 72, ...
    mesh.nodes.push_back(from_lat_lon_deg(ring_lat, 72.0 * i));
  for (int i = 0; i < 5; ++i)  // lower ring, offset by 36 degrees
    mesh.nodes.push_back(from_lat_lon_deg(-ring_lat, 36.0 + 72.0 * i));
  mesh.nodes.push_back({0.0, 0.0, -1.0});

  const std::uint32_t N = 0, S = 11;
  auto up = [](int i) { return static_cast<std::uint32_t>(1 + i % 5); };
  auto lo = [](int i) { return static_cast<std::uint32_t>(6 + i % 5); };
  for (int i = 0; i < 5; ++i) {
    mesh.triangles.push_back({N, up(i), up(i + 1)});
    mesh.triangles.push_back({up(i), lo(i), up(i + 1)});
    mesh.triangles.push_back({up(i + 1), lo(i), lo(i + 1)});
    mesh.triangles.push_back({lo(i), S, lo(i + 1)});
  }
  orient_outward(mesh);
  rebuild_edges(mesh);
  return mesh;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.level = mesh.level + 1;
  out.nodes = mesh.nodes;  // parents keep their indices

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
  auto mid = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const UnitVec3& pa = mesh.nodes[a];
    const UnitVec3& pb = mesh.nodes[b];
    const auto idx = static_cast<std::uint32_t>(out.nodes.size());
    out.nodes.push_back(normalized(pa.x + pb.x, pa.y + pb.y, pa.z + pb.z));
    midpoint.emplace(key, idx);
    return idx;
  };

  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const std::uint32_t ab = mid(t[0], t[1]);
    const std::uint32_t bc = mid(t[1], t[2]);
    const std::uint32_t ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }
  orient_outward(out);
  rebuild_edges(out);
  return out;
}

std::pair<TriMesh, TriMesh> build_hierarchy(int finest_level) {
  if (finest_level < 1)
    throw ConfigError("build_hierarchy: finest_level must be >= 1 (two mesh levels required)");
  TriMesh coarse = base_icosahedron();
  for (int l = 0; l < finest_level - 1; ++l) coarse = refine(coarse);
  TriMesh fine = refine(coarse);
  return {std::move(coarse), std::move(fine)};
}

double max_edge_arc(const TriMesh& mesh) {
  double longest = 0.0;
  for (const auto& [s, r] : mesh.edges)
    longest = std::max(longest, geodesic_distance(mesh.nodes[s], mesh.nodes[r]));
  return longest;
}

namespace {

// Tolerance for the containment predicate: a point on a shared edge has a
// signed volume of exactly zero in exact arithmetic; in doubles it lands
// within a few ulps of zero.
constexpr double kContainEps = 1e-12;

bool triangle_contains(const TriMesh& mesh, std::uint32_t tri, const UnitVec3& p) {
  const auto& t = mesh.triangles[tri];
  const UnitVec3& a = mesh.nodes[t[0]];
  const UnitVec3& b = mesh.nodes[t[1]];
  const UnitVec3& c = mesh.nodes[t[2]];
  return signed_volume(a, b, p) >= -kContainEps && signed_volume(b, c, p) >= -kContainEps &&
         signed_volume(c, a, p) >= -kContainEps;
}

}  // namespace

std::uint32_t containing_triangle(const TriMesh& mesh, const UnitVec3& p) {
  for (std::uint32_t i = 0; i < mesh.triangles.size(); ++i)
    if (triangle_contains(mesh, i, p)) return i;
  throw NumericError("containing_triangle: no triangle found (degenerate mesh?)");
}

TriangleLocator::TriangleLocator(const TriMesh& mesh) : mesh_(mesh) {
  // A boundary arc can stray in latitude by at most its own length, so
  // padding each triangle's vertex-latitude range by the longest edge makes
  // the bands a superset of the true coverage.
  const double slack = max_edge_arc(mesh);
  const int n_bands = std::max<int>(4, static_cast<int>(M_PI / std::max(slack, 1e-3)));
  band_width_ = M_PI / n_bands;
  bands_.assign(n_bands, {});
  for (std::uint32_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    double lo = M_PI, hi = -M_PI;
    for (int k = 0; k < 3; ++k) {
      const double lat = latitude_rad(mesh.nodes[t[k]]);
      lo = std::min(lo, lat);
      hi = std::max(hi, lat);
    }
    lo -= slack;
    hi += slack;
    const int b0 = std::clamp(static_cast<int>((lo + M_PI / 2) / band_width_), 0, n_bands - 1);
    const int b1 = std::clamp(static_cast<int>((hi + M_PI / 2) / band_width_), 0, n_bands - 1);
    for (int b = b0; b <= b1; ++b) bands_[static_cast<std::size_t>(b)].push_back(i);
  }
}

std::uint32_t TriangleLocator::locate(const UnitVec3& p) const {
  const double lat = latitude_rad(p);
  const int b = std::clamp(static_cast<int>((lat + M_PI / 2) / band_width_),
                           0, static_cast<int>(bands_.size()) - 1);
  // Band lists are in ascending index order, so the first hit is the lowest
  // qualifying index, matching containing_triangle's tie rule.
  for (std::uint32_t i : bands_[static_cast<std::size_t>(b)])
    if (triangle_contains(mesh_, i, p)) return i;
  return containing_triangle(mesh_, p);
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  binio::Writer w(path);
  w.magic("OMSH");
  w.u16(1);
  w.u16(static_cast<std::uint16_t>(mesh.level));
  w.u64(mesh.nodes.size());
  w.u64(mesh.triangles.size());
  for (const auto& n : mesh.nodes) {
    w.f64(n.x);
    w.f64(n.y);
    w.f64(n.z);
  }
  for (const auto& t : mesh.triangles)
    for (auto idx : t) w.u32(idx);
  w.close();
}

TriMesh load_mesh(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("OMSH");
  const auto version = r.u16();
  if (version != 1) throw DataError(path + ": unsupported OMSH version");
  TriMesh mesh;
  mesh.level = r.u16();
  const auto n_nodes = r.u64();
  const auto n_tris = r.u64();
  mesh.nodes.resize(n_nodes);
  for (auto& n : mesh.nodes) {
    n.x = r.f64();
    n.y = r.f64();
    n.z = r.f64();
  }
  mesh.triangles.resize(n_tris);
  for (auto& t : mesh.triangles)
    for (auto& idx : t) idx = r.u32();
  rebuild_edges(mesh);
  return mesh;
}

}  // namespace ocean
