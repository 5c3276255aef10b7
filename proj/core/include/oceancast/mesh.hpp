#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oceancast/geometry.hpp"

namespace ocean {

// Refined icosahedral triangulation of the unit sphere.
//
// Counts at level L: 10*4^L + 2 nodes, 20*4^L triangles, 30*4^L undirected
// edges. Refinement appends midpoint nodes after the parent nodes, so the
// nodes of level L are a prefix of the nodes of level L+1. Triangles keep a
// consistent outward (counter-clockwise from outside) orientation, which the
// point-location predicate relies on.
struct TriMesh {
  int level = 0;
  std::vector<UnitVec3> nodes;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  // Both directions of every triangle side, deduplicated and sorted by
  // (sender, receiver).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

// Level-0 mesh: 12 nodes, 20 triangles. Two nodes sit exactly at the
// geographic poles; the rest lie at latitudes +-atan(1/2) with longitudes in
// 36-degree steps.
TriMesh base_icosahedron();

// One 4-to-1 subdivision: edge midpoints projected back to the sphere.
TriMesh refine(const TriMesh& mesh);

// Meshes at levels finest_level-1 and finest_level. finest_level must be >= 1.
std::pair<TriMesh, TriMesh> build_hierarchy(int finest_level);

// Longest triangle side, as an arc length in radians.
double max_edge_arc(const TriMesh& mesh);

// Index of a triangle whose closed spherical region contains p; when p lies
// on a shared edge or vertex, the lowest qualifying triangle index wins.
std::uint32_t containing_triangle(const TriMesh& mesh, const UnitVec3& p);

// Point location with a latitude-band candidate index. Semantically identical
// to containing_triangle (including the lowest-index tie rule); worth using
// when locating many points against the same mesh.
class TriangleLocator {
 public:
  explicit TriangleLocator(const TriMesh& mesh);
  std::uint32_t locate(const UnitVec3& p) const;

 private:
  const TriMesh& mesh_;
  double band_width_;
  std::vector<std::vector<std::uint32_t>> bands_;
};

// "OMSH" serialization: magic, version u16, level u16, counts u64, node
// coordinates f64 LE, triangle indices u32. Edges are rebuilt on load.
void save_mesh(const TriMesh& mesh, const std::string& path);
TriMesh load_mesh(const std::string& path);

}  // namespace ocean
