#include "oceancast/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

namespace ocean {

double masked_mse(const FieldSet& pred, const FieldSet& truth, const NormStats& stats,
                  const OceanGrid& grid, const std::vector<double>& channel_weights) {
  if (!pred.schema->same_as(*truth.schema) || !pred.schema->same_as(*stats.schema))
    throw DataError("masked_mse: schema mismatch");
  if (pred.n_lat != grid.n_lat || pred.n_lon != grid.n_lon)
    throw DataError("masked_mse: grid mismatch");
  const auto cells = grid.ocean_cells();
  if (cells.empty()) throw DataError("masked_mse: no ocean cells");

  const int c_x = pred.channels();
  std::vector<double> w(static_cast<std::size_t>(c_x), 1.0);
  if (!channel_weights.empty()) {
    if (static_cast<int>(channel_weights.size()) != c_x)
      throw ConfigError("masked_mse: channel weight count mismatch");
    w = channel_weights;
  }
  double wsum = 0.0;
  for (double v : w) wsum += v;

  double acc = 0.0;
  for (int c = 0; c < c_x; ++c) {
    const float* p = &pred.values[static_cast<std::size_t>(c) * pred.plane()];
    const float* t = &truth.values[static_cast<std::size_t>(c) * truth.plane()];
    const double inv = 1.0 / stats.std_state[static_cast<std::size_t>(c)];
    double ch = 0.0;
    for (auto cell : cells) {
      const double e = (static_cast<double>(p[cell]) - t[cell]) * inv;
      ch += e * e;
    }
    acc += w[static_cast<std::size_t>(c)] * (ch / static_cast<double>(cells.size()));
  }
  return acc / wsum;
}

void save_train_log(const std::vector<TrainLogRow>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "step,loss,grad_norm,val_loss,seconds\n";
  for (const auto& r : log) {
    out << r.step << "," << r.loss << "," << r.grad_norm << ",";
    if (r.val_loss) out << *r.val_loss;
    out << "," << r.seconds << "\n";
  }
}

double validation_loss(const Dataset& ds, const NormStats& stats, const OceanGrid& grid,
                       const ModelConfig& cfg, ParamStore<float>& params,
                       const GraphTensors<float>& gt, const TrainConfig& tc, int steps_ahead) {
  const ModelDims dims = model_dims(*stats.schema);
  const std::int64_t last_valid = tc.val_day_end - steps_ahead;  // t needs days up to t+steps
  if (last_valid < tc.val_day_begin) throw ConfigError("validation day range too small");
  const std::int64_t span = last_valid - tc.val_day_begin;
  const int cases = std::max(1, std::min<int>(tc.val_cases, static_cast<int>(span + 1)));

  double acc = 0.0;
  for (int i = 0; i < cases; ++i) {
    const std::int64_t t = tc.val_day_begin + (cases == 1 ? 0 : span * i / (cases - 1));
    auto batch = make_step_batch<float>(ds, t, steps_ahead == 2, stats, grid, tc.channel_weights);
    Tape<float> tape(&params);
    const int loss = rollout_loss(tape, cfg, dims, gt, batch);
    acc += static_cast<double>(tape.value(loss)(0, 0));
  }
  return acc / cases;
}

std::int64_t sample_train_day(const TrainConfig& tc, std::int64_t draw_index, int need_ahead) {
  const std::int64_t span = tc.train_day_end - need_ahead - tc.train_day_begin + 1;
  std::uint64_t h = binio::fnv1a(&draw_index, sizeof draw_index, tc.seed ^ 0x2545f4914f6cdd1dull);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return tc.train_day_begin + static_cast<std::int64_t>(h % static_cast<std::uint64_t>(span));
}

TrainResult train_phase(const Dataset& ds, const OceanGrid& grid, const OceanGraph& graph,
                        const NormStats& stats, const ModelConfig& cfg, const TrainConfig& tc,
                        ParamStore<float>& params, const std::string& config_json,
                        AdamWState<float>* opt_in) {
  if (tc.phase != 1 && tc.phase != 2) throw ConfigError("train_phase: phase must be 1 or 2");
  const bool two_step = tc.phase == 2;
  const int need_ahead = two_step ? 2 : 1;
  if (tc.train_day_end - need_ahead < tc.train_day_begin)
    throw ConfigError("train_phase: training day range too small");
  if (tc.steps < 1) throw ConfigError("train_phase: step budget must be positive");

  const ModelDims dims = model_dims(*stats.schema);
  const GraphTensors<float> gt = make_graph_tensors<float>(graph);
  if (static_cast<std::size_t>(gt.n_grid) != grid.ocean_cells().size())
    throw DataError("train_phase: graph does not match grid mask");

  AdamWState<float> opt;
  if (opt_in) opt = std::move(*opt_in);
  opt.lr = tc.lr;
  opt.beta1 = tc.beta1;
  opt.beta2 = tc.beta2;
  opt.eps = tc.eps;
  opt.weight_decay = tc.weight_decay;
  const int start_step = static_cast<int>(opt.step);

  const std::string ckpt_path = tc.out_dir + "/ckpt_phase" + std::to_string(tc.phase) + ".ockp";
  TrainResult result;
  result.checkpoint_path = ckpt_path;

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  for (int step = start_step + 1; step <= tc.steps; ++step) {
    std::vector<Matrix<float>> grads;
    double loss_acc = 0.0;
    for (int b = 0; b < tc.batch_size; ++b) {
      const std::int64_t t = sample_train_day(
          tc, static_cast<std::int64_t>(step - 1) * tc.batch_size + b, need_ahead);
      auto batch = make_step_batch<float>(ds, t, two_step, stats, grid, tc.channel_weights);
      Tape<float> tape(&params);
      const int loss = rollout_loss(tape, cfg, dims, gt, batch);
      loss_acc += static_cast<double>(tape.value(loss)(0, 0));
      auto g = tape.backward(loss);
      if (grads.empty()) {
        grads = std::move(g);
      } else {
        for (std::size_t p = 0; p < grads.size(); ++p)
          for (std::size_t i = 0; i < grads[p].size(); ++i) grads[p].data[i] += g[p].data[i];
      }
    }
    const double loss_mean = loss_acc / tc.batch_size;
    if (tc.batch_size > 1) {
      const float inv = 1.0f / static_cast<float>(tc.batch_size);
      for (auto& g : grads)
        for (auto& v : g.data) v *= inv;
    }

    double gn2 = 0.0;
    for (const auto& g : grads)
      for (float v : g.data) gn2 += static_cast<double>(v) * v;
    const double grad_norm = std::sqrt(gn2);

    if (!std::isfinite(loss_mean) || !std::isfinite(grad_norm)) {
      save_train_log(result.log, tc.out_dir + "/train_phase" + std::to_string(tc.phase) + ".csv");
      throw NumericError("train_phase: non-finite loss at step " + std::to_string(step) +
                         "; last good checkpoint retained");
    }

    adamw_step(opt, params, grads);

    TrainLogRow row;
    row.step = step;
    row.loss = loss_mean;
    row.grad_norm = grad_norm;
    row.seconds = elapsed();
    if (step % tc.val_interval == 0 || step == tc.steps)
      row.val_loss = validation_loss(ds, stats, grid, cfg, params, gt, tc, need_ahead);
    result.log.push_back(row);

    if (step % tc.checkpoint_interval == 0 || step == tc.steps)
      save_checkpoint(params, &opt, config_json, ckpt_path);
  }

  if (!result.log.empty() && result.log.back().val_loss)
    result.final_val_loss = *result.log.back().val_loss;
  else
    result.final_val_loss = validation_loss(ds, stats, grid, cfg, params, gt, tc, need_ahead);
  save_train_log(result.log, tc.out_dir + "/train_phase" + std::to_string(tc.phase) + ".csv");
  return result;
}

}  // namespace ocean
