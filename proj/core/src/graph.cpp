#include "oceancast/graph.hpp"

#include <algorithm>
#include <cmath>

#include "oceancast/binio.hpp"
#include "oceancast/threading.hpp"

namespace ocean {

namespace {

using EdgePairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

void sort_pairs(EdgePairs& e) {
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
}

}  // namespace

std::array<float, 3> mesh_node_features(const UnitVec3& p) {
  const double lat = latitude_rad(p);
  const double lon = longitude_rad(p);
  return {static_cast<float>(std::cos(lat)), static_cast<float>(std::sin(lon)),
          static_cast<float>(std::cos(lon))};
}

EdgePairs grid_to_mesh_edges(const OceanGrid& grid, const TriMesh& mesh, double radius_arc) {
  if (radius_arc <= 0.0) throw ConfigError("grid_to_mesh_edges: radius must be positive");
  const auto ocean = grid.ocean_cells();
  const auto pos = grid.cell_positions();

  std::vector<EdgePairs> per_node(ocean.size());
  parallel_for(ocean.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t g = lo; g < hi; ++g) {
      const UnitVec3& p = pos[ocean[g]];
      auto& edges = per_node[g];
      double best = 1e30;
      std::uint32_t nearest = 0;
      for (std::uint32_t m = 0; m < mesh.nodes.size(); ++m) {
        const double d = geodesic_distance(p, mesh.nodes[m]);
        if (d <= radius_arc) edges.emplace_back(static_cast<std::uint32_t>(g), m);
        if (d < best) {
          best = d;
          nearest = m;
        }
      }
      if (edges.empty()) edges.emplace_back(static_cast<std::uint32_t>(g), nearest);
    }
  });

  EdgePairs out;
  for (auto& e : per_node) out.insert(out.end(), e.begin(), e.end());
  sort_pairs(out);
  return out;
}

EdgePairs mesh_to_grid_edges(const OceanGrid& grid, const TriMesh& mesh) {
  const auto ocean = grid.ocean_cells();
  const auto pos = grid.cell_positions();
  const TriangleLocator locator(mesh);

  EdgePairs out(ocean.size() * 3);
  parallel_for(ocean.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t g = lo; g < hi; ++g) {
      const auto tri = mesh.triangles[locator.locate(pos[ocean[g]])];
      for (int k = 0; k < 3; ++k) out[g * 3 + k] = {tri[k], static_cast<std::uint32_t>(g)};
    }
  });
  sort_pairs(out);
  return out;
}

EdgePairs prune_mesh_edges(const TriMesh& mesh, const std::vector<bool>& ocean_connected) {
  if (ocean_connected.size() != mesh.nodes.size())
    throw ConfigError("prune_mesh_edges: flag count mismatch");
  EdgePairs out;
  for (const auto& [s, r] : mesh.edges)
    if (ocean_connected[s] && ocean_connected[r]) out.emplace_back(s, r);
  sort_pairs(out);
  return out;
}

namespace {

EdgeSet with_features(EdgePairs pairs, const std::vector<UnitVec3>& sender_pos,
                      const std::vector<UnitVec3>& receiver_pos) {
  EdgeSet out;
  out.senders.resize(pairs.size());
  out.receivers.resize(pairs.size());
  out.features.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t e = lo; e < hi; ++e) {
      out.senders[e] = pairs[e].first;
      out.receivers[e] = pairs[e].second;
      const auto f = local_edge_features(sender_pos[pairs[e].first], receiver_pos[pairs[e].second]);
      for (int k = 0; k < 4; ++k) out.features[e][k] = static_cast<float>(f[k]);
    }
  });
  return out;
}

EdgePairs flipped(const EdgePairs& e) {
  EdgePairs out;
  out.reserve(e.size());
  for (const auto& [s, r] : e) out.emplace_back(r, s);
  sort_pairs(out);
  return out;
}

}  // namespace

OceanGraph build_ocean_graph(const OceanGrid& grid, const TriMesh& coarse, const TriMesh& fine,
                             double radius_factor, bool edges_to_coarse) {
  grid.validate();
  if (radius_factor <= 0.0) throw ConfigError("build_ocean_graph: radius_factor must be positive");

  OceanGraph g;
  g.n_lat = grid.n_lat;
  g.n_lon = grid.n_lon;
  g.grid_cells = grid.ocean_cells();
  const auto pos = grid.cell_positions();
  g.grid_pos.reserve(g.grid_cells.size());
  for (auto c : g.grid_cells) g.grid_pos.push_back(pos[c]);

  g.mesh_pos_coarse = coarse.nodes;
  g.mesh_pos_fine = fine.nodes;
  for (const auto& p : coarse.nodes) g.mesh_feats_coarse.push_back(mesh_node_features(p));
  for (const auto& p : fine.nodes) g.mesh_feats_fine.push_back(mesh_node_features(p));

  const double radius = radius_factor * max_edge_arc(fine);

  const EdgePairs g2m_f = grid_to_mesh_edges(grid, fine, radius);
  const EdgePairs m2g_f = mesh_to_grid_edges(grid, fine);
  EdgePairs g2m_c, m2g_c;
  if (edges_to_coarse) {
    g2m_c = grid_to_mesh_edges(grid, coarse, radius);
    m2g_c = mesh_to_grid_edges(grid, coarse);
  }

  // Mesh nodes are ocean-connected when they touch any ocean grid cell
  // through a grid->mesh or mesh->grid edge.
  auto connected_flags = [](const TriMesh& mesh, const EdgePairs& g2m, const EdgePairs& m2g) {
    std::vector<bool> flags(mesh.nodes.size(), false);
    for (const auto& [s, r] : g2m) flags[r] = true;
    for (const auto& [s, r] : m2g) flags[s] = true;
    return flags;
  };
  const EdgePairs m2m_c = prune_mesh_edges(coarse, connected_flags(coarse, g2m_c, m2g_c));
  const EdgePairs m2m_f = prune_mesh_edges(fine, connected_flags(fine, g2m_f, m2g_f));

  // Coverage check: every ocean node needs a decode path.
  {
    std::vector<int> incoming(g.grid_pos.size(), 0);
    for (const auto& [s, r] : m2g_f) incoming[r]++;
    for (const auto& [s, r] : m2g_c) incoming[r]++;
    for (std::size_t i = 0; i < incoming.size(); ++i)
      if (incoming[i] == 0)
        throw DataError("build_ocean_graph: ocean cell without mesh-to-grid coverage");
  }

  g.g2m_coarse = with_features(g2m_c, g.grid_pos, g.mesh_pos_coarse);
  g.g2m_fine = with_features(g2m_f, g.grid_pos, g.mesh_pos_fine);
  g.m2m_coarse = with_features(m2m_c, g.mesh_pos_coarse, g.mesh_pos_coarse);
  g.m2m_fine = with_features(m2m_f, g.mesh_pos_fine, g.mesh_pos_fine);
  g.m2g_coarse = with_features(m2g_c, g.mesh_pos_coarse, g.grid_pos);
  g.m2g_fine = with_features(m2g_f, g.mesh_pos_fine, g.grid_pos);
  return g;
}

namespace {

void write_edge_set(binio::Writer& w, const EdgeSet& e) {
  w.u64(e.size());
  w.vec(e.senders);
  w.vec(e.receivers);
  for (const auto& f : e.features)
    for (float v : f) w.f32(v);
}

EdgeSet read_edge_set(binio::Reader& r) {
  EdgeSet e;
  const auto n = r.u64();
  e.senders = r.vec<std::uint32_t>(n);
  e.receivers = r.vec<std::uint32_t>(n);
  e.features.resize(n);
  for (auto& f : e.features)
    for (auto& v : f) v = r.f32();
  return e;
}

void write_positions(binio::Writer& w, const std::vector<UnitVec3>& pos) {
  w.u64(pos.size());
  for (const auto& p : pos) {
    w.f64(p.x);
    w.f64(p.y);
    w.f64(p.z);
  }
}

std::vector<UnitVec3> read_positions(binio::Reader& r) {
  std::vector<UnitVec3> pos(r.u64());
  for (auto& p : pos) {
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
  }
  return pos;
}

}  // namespace

void save_graph(const OceanGraph& g, const std::string& path) {
  binio::Writer w(path);
  w.magic("OGRF");
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(g.n_lat));
  w.u32(static_cast<std::uint32_t>(g.n_lon));
  w.u64(g.grid_cells.size());
  w.vec(g.grid_cells);
  write_positions(w, g.grid_pos);
  write_positions(w, g.mesh_pos_coarse);
  write_positions(w, g.mesh_pos_fine);
  for (const auto& f : g.mesh_feats_coarse)
    for (float v : f) w.f32(v);
  for (const auto& f : g.mesh_feats_fine)
    for (float v : f) w.f32(v);
  for (const EdgeSet* e :
       {&g.g2m_coarse, &g.g2m_fine, &g.m2m_coarse, &g.m2m_fine, &g.m2g_coarse, &g.m2g_fine})
    write_edge_set(w, *e);
  w.close();
}

OceanGraph load_graph(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("OGRF");
  if (r.u16() != 1) throw DataError(path + ": unsupported OGRF version");
  OceanGraph g;
  g.n_lat = static_cast<int>(r.u32());
  g.n_lon = static_cast<int>(r.u32());
  g.grid_cells = r.vec<std::uint32_t>(r.u64());
  g.grid_pos = read_positions(r);
  g.mesh_pos_coarse = read_positions(r);
  g.mesh_pos_fine = read_positions(r);
  g.mesh_feats_coarse.resize(g.mesh_pos_coarse.size());
  for (auto& f : g.mesh_feats_coarse)
    for (auto& v : f) v = r.f32();
  g.mesh_feats_fine.resize(g.mesh_pos_fine.size());
  for (auto& f : g.mesh_feats_fine)
    for (auto& v : f) v = r.f32();
  for (EdgeSet* e :
       {&g.g2m_coarse, &g.g2m_fine, &g.m2m_coarse, &g.m2m_fine, &g.m2g_coarse, &g.m2g_fine})
    *e = read_edge_set(r);
  return g;
}

}  // namespace ocean
