#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oceancast/fields.hpp"
#include "oceancast/mesh.hpp"

namespace ocean {

// Directed edges with 4-number geometric features, sorted by
// (receiver, sender) so construction order never leaks into results.
struct EdgeSet {
  std::vector<std::uint32_t> senders;
  std::vector<std::uint32_t> receivers;
  std::vector<std::array<float, 4>> features;

  std::size_t size() const { return senders.size(); }
};

// The pruned heterogeneous forecast graph. Grid nodes are the ocean cells in
// row-major order; the two mesh node sets are kept disjoint (a coarse node is
// not identified with its fine-mesh copy). Grid-to-mesh and mesh-to-grid
// edges exist independently against both meshes.
struct OceanGraph {
  int n_lat = 0, n_lon = 0;
  std::vector<std::uint32_t> grid_cells;  // raster index per ocean node
  std::vector<UnitVec3> grid_pos;
  std::vector<UnitVec3> mesh_pos_coarse, mesh_pos_fine;
  std::vector<std::array<float, 3>> mesh_feats_coarse, mesh_feats_fine;
  EdgeSet g2m_coarse, g2m_fine;
  EdgeSet m2m_coarse, m2m_fine;
  EdgeSet m2g_coarse, m2g_fine;

  std::size_t n_grid_nodes() const { return grid_cells.size(); }
};

// Sender: ocean-node index (position in grid.ocean_cells()); receiver: mesh
// node. An edge exists iff the arc distance is within `radius_arc`; any ocean
// cell the radius leaves unconnected falls back to its nearest mesh node.
// Land cells get no edges.
std::vector<std::pair<std::uint32_t, std::uint32_t>> grid_to_mesh_edges(
    const OceanGrid& grid, const TriMesh& mesh, double radius_arc);

// Edges from the 3 vertices of the containing triangle to each ocean cell:
// exactly 3 incoming edges per ocean cell, none for land cells.
std::vector<std::pair<std::uint32_t, std::uint32_t>> mesh_to_grid_edges(const OceanGrid& grid,
                                                                        const TriMesh& mesh);

// Keeps a mesh edge iff both endpoints are flagged ocean-connected.
std::vector<std::pair<std::uint32_t, std::uint32_t>> prune_mesh_edges(
    const TriMesh& mesh, const std::vector<bool>& ocean_connected);

// Full assembly. The grid->mesh radius is radius_factor times the longest
// fine-mesh edge, applied to both meshes; `edges_to_coarse` keeps the coarse
// mesh's grid edge sets (switchable so the fine-only alternative can be
// measured).
OceanGraph build_ocean_graph(const OceanGrid& grid, const TriMesh& coarse, const TriMesh& fine,
                             double radius_factor, bool edges_to_coarse = true);

// Mesh node input features [cos(lat), sin(lon), cos(lon)].
std::array<float, 3> mesh_node_features(const UnitVec3& p);

// "OGRF" serialization; round-trips bit-exactly.
void save_graph(const OceanGraph& g, const std::string& path);
OceanGraph load_graph(const std::string& path);

}  // namespace ocean
