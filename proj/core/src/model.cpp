#include "oceancast/model.hpp"

#include <cmath>

#include "oceancast/assemble.hpp"

namespace ocean {

Activation activation_from_name(const std::string& name) {
  if (name == "silu") return Activation::Silu;
  if (name == "relu") return Activation::Relu;
  if (name == "linear") return Activation::Linear;
  throw ConfigError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Silu: return "silu";
    case Activation::Relu: return "relu";
    default: return "linear";
  }
}

Matrix<float> extract_rows(const FieldSet& f, const std::vector<std::uint32_t>& ocean_cells) {
  const int c_n = f.channels();
  Matrix<float> out(static_cast<int>(ocean_cells.size()), c_n);
  for (int c = 0; c < c_n; ++c) {
    const float* plane = &f.values[static_cast<std::size_t>(c) * f.plane()];
    for (std::size_t r = 0; r < ocean_cells.size(); ++r)
      out(static_cast<int>(r), c) = plane[ocean_cells[r]];
  }
  return out;
}

namespace {

void append_normalized(Matrix<float>& dst, int& col, const FieldSet& f,
                       const std::vector<std::uint32_t>& cells, const NormStats& stats) {
  const auto& mean = stats.mean(f.kind);
  const auto& dev = stats.dev(f.kind);
  for (int c = 0; c < f.channels(); ++c) {
    const float* plane = &f.values[static_cast<std::size_t>(c) * f.plane()];
    const float m = static_cast<float>(mean[static_cast<std::size_t>(c)]);
    const float inv = static_cast<float>(1.0 / dev[static_cast<std::size_t>(c)]);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      float v = (plane[cells[r]] - m) * inv;
      if (!std::isfinite(v)) v = 0.0f;
      dst(static_cast<int>(r), col) = v;
    }
    ++col;
  }
}

}  // namespace

Matrix<float> assemble_grid_input(const FieldSet& x_prev, const FieldSet& x_cur,
                                  const FieldSet& a_prev, const FieldSet& a_cur,
                                  const FieldSet& a_next, const FieldSet& statics,
                                  const NormStats& stats, const OceanGrid& grid) {
  for (const FieldSet* f : {&x_prev, &x_cur, &a_prev, &a_cur, &a_next, &statics})
    if (!f->schema->same_as(*stats.schema)) throw DataError("assemble_grid_input: schema mismatch");
  if (x_cur.day != x_prev.day + 1 || a_prev.day != x_prev.day || a_cur.day != x_cur.day ||
      a_next.day != x_cur.day + 1)
    throw DataError("assemble_grid_input: time stamps not consecutive");
  if (x_prev.kind != FieldKind::State || x_cur.kind != FieldKind::State ||
      a_prev.kind != FieldKind::Forcing || a_cur.kind != FieldKind::Forcing ||
      a_next.kind != FieldKind::Forcing || statics.kind != FieldKind::Static)
    throw DataError("assemble_grid_input: field kind mismatch");

  const auto cells = grid.ocean_cells();
  const ModelDims dims = model_dims(*stats.schema);
  Matrix<float> rows(static_cast<int>(cells.size()), dims.c_in);
  int col = 0;
  append_normalized(rows, col, x_prev, cells, stats);
  append_normalized(rows, col, x_cur, cells, stats);
  append_normalized(rows, col, a_prev, cells, stats);
  append_normalized(rows, col, a_cur, cells, stats);
  append_normalized(rows, col, a_next, cells, stats);
  append_normalized(rows, col, statics, cells, stats);
  return rows;
}

FieldSet model_step(const ModelConfig& cfg, ParamStore<float>& params, const OceanGraph& graph,
                    const GraphTensors<float>& gt, const FieldSet& x_prev, const FieldSet& x_cur,
                    const FieldSet& a_prev, const FieldSet& a_cur, const FieldSet& a_next,
                    const FieldSet& statics, const NormStats& stats, const OceanGrid& grid) {
  const ModelDims dims = model_dims(*stats.schema);
  Matrix<float> input = assemble_grid_input(x_prev, x_cur, a_prev, a_cur, a_next, statics, stats, grid);
  if (static_cast<std::size_t>(input.rows) != graph.n_grid_nodes())
    throw DataError("model_step: graph/grid ocean-node count mismatch");

  Tape<float> tape(&params);
  const int delta = model_forward(tape, cfg, dims, gt, tape.constant(std::move(input)));
  const Matrix<float>& d = tape.value(delta);

  FieldSet out = make_fieldset(x_cur.schema, FieldKind::State, grid, x_cur.day + 1);
  for (int c = 0; c < dims.c_x; ++c) {
    float* plane = &out.values[static_cast<std::size_t>(c) * out.plane()];
    const float* cur = &x_cur.values[static_cast<std::size_t>(c) * x_cur.plane()];
    const float scale = static_cast<float>(stats.diff_std[static_cast<std::size_t>(c)]);
    for (std::size_t r = 0; r < graph.grid_cells.size(); ++r) {
      const auto cell = graph.grid_cells[r];
      const float v = cur[cell] + d(static_cast<int>(r), c) * scale;
      if (!std::isfinite(v)) throw NumericError("non-finite values after stage: residual output");
      plane[cell] = v;
    }
  }
  return out;
}

}  // namespace ocean
