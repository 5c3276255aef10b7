#pragma once

#include <string>

#include "oceancast/autodiff.hpp"
#include "oceancast/graph.hpp"
#include "oceancast/mlp.hpp"
#include "oceancast/stats.hpp"

namespace ocean {

struct ModelConfig {
  int embed_width = 192;
  int processor_iterations = 16;
  int hidden_layers = 1;
  Activation activation = Activation::Silu;
  // Share one parameter set across the processor iterations of a mesh
  // (ablation switch; distinct per-iteration parameters by default).
  bool share_processor_params = false;
  // Decode applies the coarse-mesh block before the fine-mesh block.
  bool decode_coarse_first = true;
  // When false the coarse mesh is dropped entirely (fine-only variant).
  bool use_coarse_mesh = true;
};

struct ModelDims {
  int c_in = 0;  // 2*C_X + 3*C_A + C_S
  int c_x = 0;
};

inline ModelDims model_dims(const ChannelSchema& schema) {
  ModelDims d;
  d.c_x = static_cast<int>(schema.state.size());
  d.c_in = 2 * d.c_x + 3 * static_cast<int>(schema.forcing.size()) +
           static_cast<int>(schema.statics.size());
  return d;
}

// Graph arrays in tape-ready form (features cast to the compute scalar,
// shared index arrays). Build once per (graph, scalar type) and reuse.
template <class T>
struct GraphTensors {
  int n_grid = 0, n_coarse = 0, n_fine = 0;
  Matrix<T> mesh_feats_coarse, mesh_feats_fine;
  // order: g2m_c, g2m_f, m2m_c, m2m_f, m2g_c, m2g_f
  std::array<Matrix<T>, 6> edge_feats;
  std::array<IndexArray, 6> senders, receivers;
};

enum EdgeSlot { kG2MC = 0, kG2MF, kM2MC, kM2MF, kM2GC, kM2GF };

template <class T>
GraphTensors<T> make_graph_tensors(const OceanGraph& g) {
  GraphTensors<T> gt;
  gt.n_grid = static_cast<int>(g.n_grid_nodes());
  gt.n_coarse = static_cast<int>(g.mesh_pos_coarse.size());
  gt.n_fine = static_cast<int>(g.mesh_pos_fine.size());
  auto feats3 = [](const std::vector<std::array<float, 3>>& f) {
    Matrix<T> m(static_cast<int>(f.size()), 3);
    for (std::size_t r = 0; r < f.size(); ++r)
      for (int c = 0; c < 3; ++c) m(static_cast<int>(r), c) = static_cast<T>(f[r][c]);
    return m;
  };
  gt.mesh_feats_coarse = feats3(g.mesh_feats_coarse);
  gt.mesh_feats_fine = feats3(g.mesh_feats_fine);
  const EdgeSet* sets[6] = {&g.g2m_coarse, &g.g2m_fine, &g.m2m_coarse,
                            &g.m2m_fine,   &g.m2g_coarse, &g.m2g_fine};
  for (int s = 0; s < 6; ++s) {
    const EdgeSet& e = *sets[s];
    Matrix<T> f(static_cast<int>(e.size()), 4);
    for (std::size_t r = 0; r < e.size(); ++r)
      for (int c = 0; c < 4; ++c) f(static_cast<int>(r), c) = static_cast<T>(e.features[r][c]);
    gt.edge_feats[s] = std::move(f);
    gt.senders[s] = make_index_array(std::vector<std::uint32_t>(e.senders));
    gt.receivers[s] = make_index_array(std::vector<std::uint32_t>(e.receivers));
  }
  return gt;
}

// Latent state as tape node ids (embedding-width node and edge features).
struct LatentState {
  int v_grid = -1;
  int v_mesh_coarse = -1, v_mesh_fine = -1;
  int e_g2m_coarse = -1, e_g2m_fine = -1;
  int e_m2m_coarse = -1, e_m2m_fine = -1;
  int e_m2g_coarse = -1, e_m2g_fine = -1;
};

namespace detail {

inline MlpSpec block_mlp(int in, int width, const ModelConfig& cfg) {
  MlpSpec s;
  s.in = in;
  s.hidden = width;
  s.out = width;
  s.hidden_layers = cfg.hidden_layers;
  s.final_layer_norm = true;
  s.activation = cfg.activation;
  return s;
}

template <class T>
void create_gnn_block_params(ParamStore<T>& store, const std::string& prefix,
                             const ModelConfig& cfg) {
  const int w = cfg.embed_width;
  create_mlp_params(store, prefix + "/edge", block_mlp(3 * w, w, cfg));
  create_mlp_params(store, prefix + "/node", block_mlp(2 * w, w, cfg));
}

inline std::string processor_prefix(const ModelConfig& cfg, const char* mesh, int iteration) {
  if (cfg.share_processor_params) return std::string("proc/") + mesh + "/shared";
  return std::string("proc/") + mesh + "/it" + std::to_string(iteration);
}

}  // namespace detail

template <class T>
void create_model_params(ParamStore<T>& store, const ModelConfig& cfg, const ModelDims& dims) {
  const int w = cfg.embed_width;
  create_mlp_params(store, "embed/grid", detail::block_mlp(dims.c_in, w, cfg));
  create_mlp_params(store, "embed/mesh", detail::block_mlp(3, w, cfg));
  create_mlp_params(store, "embed/g2m", detail::block_mlp(4, w, cfg));
  create_mlp_params(store, "embed/m2m", detail::block_mlp(4, w, cfg));
  create_mlp_params(store, "embed/m2g", detail::block_mlp(4, w, cfg));

  detail::create_gnn_block_params(store, "enc/g2m_fine", cfg);
  if (cfg.use_coarse_mesh) detail::create_gnn_block_params(store, "enc/g2m_coarse", cfg);
  create_mlp_params(store, "enc/grid", detail::block_mlp(w, w, cfg));

  const int n_proc = cfg.share_processor_params ? 1 : cfg.processor_iterations;
  for (int i = 0; i < n_proc; ++i) {
    detail::create_gnn_block_params(store, detail::processor_prefix(cfg, "fine", i), cfg);
    if (cfg.use_coarse_mesh)
      detail::create_gnn_block_params(store, detail::processor_prefix(cfg, "coarse", i), cfg);
  }

  detail::create_gnn_block_params(store, "dec/m2g_fine", cfg);
  if (cfg.use_coarse_mesh) detail::create_gnn_block_params(store, "dec/m2g_coarse", cfg);
  MlpSpec out = detail::block_mlp(w, dims.c_x, cfg);
  out.final_layer_norm = false;  // decoder emits unbounded deltas
  create_mlp_params(store, "dec/out", out);
}

// One message-passing block (GNN_{N=1}): edge update then node update, both
// residual. Returns {updated edge node id, updated receiver node id}.
template <class T>
std::pair<int, int> gnn_block(Tape<T>& tape, const std::string& prefix, const ModelConfig& cfg,
                              int v_sender, int v_receiver, int e, const IndexArray& senders,
                              const IndexArray& receivers, int n_receiver) {
  const int w = cfg.embed_width;
  const int e_in = tape.concat_cols(
      {e, tape.gather_rows(v_sender, senders), tape.gather_rows(v_receiver, receivers)});
  const int e_new = tape.add(mlp_forward(tape, prefix + "/edge", detail::block_mlp(3 * w, w, cfg), e_in), e);
  const int agg = tape.segment_sum(e_new, receivers, n_receiver);
  const int v_in = tape.concat_cols({v_receiver, agg});
  const int v_new =
      tape.add(mlp_forward(tape, prefix + "/node", detail::block_mlp(2 * w, w, cfg), v_in), v_receiver);
  return {e_new, v_new};
}

template <class T>
void check_finite(const Tape<T>& tape, int node, const char* stage) {
  if (!tape.value(node).all_finite())
    throw NumericError(std::string("non-finite values after stage: ") + stage);
}

template <class T>
LatentState encode(Tape<T>& tape, const ModelConfig& cfg, const GraphTensors<T>& gt,
                   int grid_input) {
  const int w = cfg.embed_width;
  LatentState s;
  s.v_grid = mlp_forward(tape, "embed/grid",
                         detail::block_mlp(tape.value(grid_input).cols, w, cfg), grid_input);
  s.v_mesh_fine = mlp_forward(tape, "embed/mesh", detail::block_mlp(3, w, cfg),
                              tape.constant(gt.mesh_feats_fine));
  s.e_g2m_fine = mlp_forward(tape, "embed/g2m", detail::block_mlp(4, w, cfg),
                             tape.constant(gt.edge_feats[kG2MF]));
  s.e_m2m_fine = mlp_forward(tape, "embed/m2m", detail::block_mlp(4, w, cfg),
                             tape.constant(gt.edge_feats[kM2MF]));
  s.e_m2g_fine = mlp_forward(tape, "embed/m2g", detail::block_mlp(4, w, cfg),
                             tape.constant(gt.edge_feats[kM2GF]));
  if (cfg.use_coarse_mesh) {
    s.v_mesh_coarse = mlp_forward(tape, "embed/mesh", detail::block_mlp(3, w, cfg),
                                  tape.constant(gt.mesh_feats_coarse));
    s.e_g2m_coarse = mlp_forward(tape, "embed/g2m", detail::block_mlp(4, w, cfg),
                                 tape.constant(gt.edge_feats[kG2MC]));
    s.e_m2m_coarse = mlp_forward(tape, "embed/m2m", detail::block_mlp(4, w, cfg),
                                 tape.constant(gt.edge_feats[kM2MC]));
    s.e_m2g_coarse = mlp_forward(tape, "embed/m2g", detail::block_mlp(4, w, cfg),
                                 tape.constant(gt.edge_feats[kM2GC]));
  }

  // Both mesh latents update from the same pre-update grid latent.
  auto [ef, vf] = gnn_block(tape, "enc/g2m_fine", cfg, s.v_grid, s.v_mesh_fine, s.e_g2m_fine,
                            gt.senders[kG2MF], gt.receivers[kG2MF], gt.n_fine);
  s.e_g2m_fine = ef;
  s.v_mesh_fine = vf;
  if (cfg.use_coarse_mesh) {
    auto [ec, vc] = gnn_block(tape, "enc/g2m_coarse", cfg, s.v_grid, s.v_mesh_coarse,
                              s.e_g2m_coarse, gt.senders[kG2MC], gt.receivers[kG2MC], gt.n_coarse);
    s.e_g2m_coarse = ec;
    s.v_mesh_coarse = vc;
  }
  s.v_grid = tape.add(mlp_forward(tape, "enc/grid", detail::block_mlp(w, w, cfg), s.v_grid), s.v_grid);

  check_finite(tape, s.v_grid, "encode");
  check_finite(tape, s.v_mesh_fine, "encode");
  return s;
}

// Independent message passing on each mesh; no cross-mesh edges exist.
template <class T>
LatentState process(Tape<T>& tape, const ModelConfig& cfg, const GraphTensors<T>& gt,
                    LatentState s) {
  for (int it = 0; it < cfg.processor_iterations; ++it) {
    auto [ef, vf] = gnn_block(tape, detail::processor_prefix(cfg, "fine", it), cfg,
                              s.v_mesh_fine, s.v_mesh_fine, s.e_m2m_fine, gt.senders[kM2MF],
                              gt.receivers[kM2MF], gt.n_fine);
    s.e_m2m_fine = ef;
    s.v_mesh_fine = vf;
    if (cfg.use_coarse_mesh) {
      auto [ec, vc] = gnn_block(tape, detail::processor_prefix(cfg, "coarse", it), cfg,
                                s.v_mesh_coarse, s.v_mesh_coarse, s.e_m2m_coarse,
                                gt.senders[kM2MC], gt.receivers[kM2MC], gt.n_coarse);
      s.e_m2m_coarse = ec;
      s.v_mesh_coarse = vc;
    }
  }
  check_finite(tape, s.v_mesh_fine, "process");
  return s;
}

// Mesh-to-grid blocks (coarse before fine by default), then the output MLP
// mapping the grid latent to normalized state deltas.
template <class T>
int decode(Tape<T>& tape, const ModelConfig& cfg, const ModelDims& dims, const GraphTensors<T>& gt,
           LatentState s) {
  const int w = cfg.embed_width;
  auto apply_coarse = [&]() {
    auto [ec, vg] = gnn_block(tape, "dec/m2g_coarse", cfg, s.v_mesh_coarse, s.v_grid,
                              s.e_m2g_coarse, gt.senders[kM2GC], gt.receivers[kM2GC], gt.n_grid);
    s.e_m2g_coarse = ec;
    s.v_grid = vg;
  };
  auto apply_fine = [&]() {
    auto [ef, vg] = gnn_block(tape, "dec/m2g_fine", cfg, s.v_mesh_fine, s.v_grid, s.e_m2g_fine,
                              gt.senders[kM2GF], gt.receivers[kM2GF], gt.n_grid);
    s.e_m2g_fine = ef;
    s.v_grid = vg;
  };
  if (cfg.use_coarse_mesh && cfg.decode_coarse_first) apply_coarse();
  apply_fine();
  if (cfg.use_coarse_mesh && !cfg.decode_coarse_first) apply_coarse();

  MlpSpec out = detail::block_mlp(w, dims.c_x, cfg);
  out.final_layer_norm = false;
  const int delta = mlp_forward(tape, "dec/out", out, s.v_grid);
  check_finite(tape, delta, "decode");
  return delta;
}

// Full step function on tape: grid input rows -> normalized state delta.
template <class T>
int model_forward(Tape<T>& tape, const ModelConfig& cfg, const ModelDims& dims,
                  const GraphTensors<T>& gt, int grid_input) {
  LatentState s = encode(tape, cfg, gt, grid_input);
  s = process(tape, cfg, gt, s);
  return decode(tape, cfg, dims, gt, s);
}

// FieldSet-level one-step prediction X^{t+1} = X^t + scaled residual; land
// cells keep the fill sentinel.
FieldSet model_step(const ModelConfig& cfg, ParamStore<float>& params, const OceanGraph& graph,
                    const GraphTensors<float>& gt, const FieldSet& x_prev, const FieldSet& x_cur,
                    const FieldSet& a_prev, const FieldSet& a_cur, const FieldSet& a_next,
                    const FieldSet& statics, const NormStats& stats, const OceanGrid& grid);

}  // namespace ocean
