#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oceancast/assemble.hpp"
#include "oceancast/dataset.hpp"
#include "oceancast/model.hpp"

namespace ocean {

// Masked MSE in normalized units: mean over ocean cells and state channels of
// ((pred - truth) / level_std)^2, channel-weighted; land cells contribute
// nothing.
double masked_mse(const FieldSet& pred, const FieldSet& truth, const NormStats& stats,
                  const OceanGrid& grid, const std::vector<double>& channel_weights = {});

// Per-column weights turning Tape::weighted_mse_vs into masked_mse.
template <class T>
std::vector<T> mse_col_weights(const NormStats& stats, const std::vector<double>& channel_weights) {
  const std::size_t c_x = stats.std_state.size();
  std::vector<double> w(c_x, 1.0);
  if (!channel_weights.empty()) {
    if (channel_weights.size() != c_x) throw ConfigError("channel weight count mismatch");
    w = channel_weights;
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  if (sum <= 0.0) throw ConfigError("channel weights must sum to a positive value");
  std::vector<T> out(c_x);
  for (std::size_t c = 0; c < c_x; ++c)
    out[c] = static_cast<T>(w[c] / (stats.std_state[c] * stats.std_state[c] * sum));
  return out;
}

// Prepared tensors for a 1- or 2-step training sample, all in the compute
// scalar. Rows enumerate ocean cells.
template <class T>
struct StepBatch {
  Matrix<T> input1;      // [N x C_in], normalized
  Matrix<T> x_cur_phys;  // [N x C_X]
  Matrix<T> truth1_phys;
  bool two_step = false;
  Matrix<T> x_cur_norm;            // x_prev part of the step-2 input
  std::array<Matrix<T>, 3> a_norm;  // forcing rows for days t, t+1, t+2
  Matrix<T> statics_norm;
  Matrix<T> truth2_phys;
  std::vector<T> diff_std;      // residual scale per state channel
  std::vector<T> neg_mean;      // -level mean (state)
  std::vector<T> inv_std;       // 1 / level std (state)
  std::vector<T> col_w;         // loss column weights
};

template <class T>
Matrix<T> cast_matrix(const Matrix<float>& m) {
  Matrix<T> out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.size(); ++i) out.data[i] = static_cast<T>(m.data[i]);
  return out;
}

// Loss of a 1-step prediction, or the mean of both step losses for a 2-step
// rollout with gradients flowing through the fed-back prediction. Returns the
// tape node of the scalar loss.
template <class T>
int rollout_loss(Tape<T>& tape, const ModelConfig& cfg, const ModelDims& dims,
                 const GraphTensors<T>& gt, const StepBatch<T>& batch) {
  const int delta1 = model_forward(tape, cfg, dims, gt, tape.constant(batch.input1));
  const int pred1 =
      tape.add(tape.constant(batch.x_cur_phys), tape.scale_cols(delta1, batch.diff_std));
  const int loss1 = tape.weighted_mse_vs(pred1, batch.truth1_phys, batch.col_w);
  if (!batch.two_step) return loss1;

  const int pred1_norm =
      tape.scale_cols(tape.shift_cols(pred1, batch.neg_mean), batch.inv_std);
  const int input2 = tape.concat_cols({tape.constant(batch.x_cur_norm), pred1_norm,
                                       tape.constant(batch.a_norm[0]), tape.constant(batch.a_norm[1]),
                                       tape.constant(batch.a_norm[2]),
                                       tape.constant(batch.statics_norm)});
  const int delta2 = model_forward(tape, cfg, dims, gt, input2);
  const int pred2 = tape.add(pred1, tape.scale_cols(delta2, batch.diff_std));
  const int loss2 = tape.weighted_mse_vs(pred2, batch.truth2_phys, batch.col_w);
  return tape.lincomb(loss1, loss2, 0.5, 0.5);
}

// Builds the batch for the sample predicting day t+1 (and t+2 in phase 2).
template <class T>
StepBatch<T> make_step_batch(const Dataset& ds, std::int64_t t, bool two_step,
                             const NormStats& stats, const OceanGrid& grid,
                             const std::vector<double>& channel_weights) {
  const auto cells = grid.ocean_cells();
  const FieldSet x_prev = ds.state(t - 1);
  const FieldSet x_cur = ds.state(t);
  const FieldSet x_next = ds.state(t + 1);
  const FieldSet a_prev = ds.forcing(t - 1);
  const FieldSet a_cur = ds.forcing(t);
  const FieldSet a_next = ds.forcing(t + 1);

  StepBatch<T> b;
  b.input1 = cast_matrix<T>(
      assemble_grid_input(x_prev, x_cur, a_prev, a_cur, a_next, ds.statics(), stats, grid));
  b.x_cur_phys = cast_matrix<T>(extract_rows(x_cur, cells));
  b.truth1_phys = cast_matrix<T>(extract_rows(x_next, cells));
  b.two_step = two_step;

  const std::size_t c_x = stats.std_state.size();
  b.diff_std.resize(c_x);
  b.neg_mean.resize(c_x);
  b.inv_std.resize(c_x);
  for (std::size_t c = 0; c < c_x; ++c) {
    b.diff_std[c] = static_cast<T>(stats.diff_std[c]);
    b.neg_mean[c] = static_cast<T>(-stats.mean_state[c]);
    b.inv_std[c] = static_cast<T>(1.0 / stats.std_state[c]);
  }
  b.col_w = mse_col_weights<T>(stats, channel_weights);

  if (two_step) {
    const FieldSet x_next2 = ds.state(t + 2);
    const FieldSet a_next2 = ds.forcing(t + 2);
    b.truth2_phys = cast_matrix<T>(extract_rows(x_next2, cells));
    b.x_cur_norm = cast_matrix<T>(extract_rows(normalize(x_cur, stats), cells));
    b.a_norm[0] = cast_matrix<T>(extract_rows(normalize(a_cur, stats), cells));
    b.a_norm[1] = cast_matrix<T>(extract_rows(normalize(a_next, stats), cells));
    b.a_norm[2] = cast_matrix<T>(extract_rows(normalize(a_next2, stats), cells));
    b.statics_norm = cast_matrix<T>(extract_rows(normalize(ds.statics(), stats), cells));
  }
  return b;
}

struct TrainConfig {
  int phase = 1;  // 1: one-step, 2: two-step fine-tuning (needs a phase-1 checkpoint)
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.0;
  int batch_size = 1;
  int steps = 500;
  std::uint64_t seed = 0;
  std::int64_t train_day_begin = 1, train_day_end = 300;  // sampled t range
  std::int64_t val_day_begin = 300, val_day_end = 360;
  int val_interval = 50;
  int val_cases = 8;  // evenly spaced validation days per evaluation
  int checkpoint_interval = 200;
  std::vector<double> channel_weights;  // empty = uniform
  std::string data_dir;
  std::string out_dir;
};

struct TrainLogRow {
  int step = 0;
  double loss = 0, grad_norm = 0;
  std::optional<double> val_loss;
  double seconds = 0;
};

struct TrainResult {
  std::vector<TrainLogRow> log;
  std::string checkpoint_path;
  double final_val_loss = 0;  // at the phase's own step count (1 or 2)
};

void save_train_log(const std::vector<TrainLogRow>& log, const std::string& path);

// Mean validation loss over evenly spaced days, with `steps_ahead` rollout
// steps (1 or 2), matching the training objective of that phase.
double validation_loss(const Dataset& ds, const NormStats& stats, const OceanGrid& grid,
                       const ModelConfig& cfg, ParamStore<float>& params,
                       const GraphTensors<float>& gt, const TrainConfig& tc, int steps_ahead);

// Sampled training day for a given draw index: a stateless hash of
// (seed, index), so an interrupted run resumed from a checkpoint replays the
// exact remaining sample sequence.
std::int64_t sample_train_day(const TrainConfig& tc, std::int64_t draw_index, int need_ahead);

// One training phase: samples random day triples (quadruples in phase 2),
// AdamW updates, periodic validation and checkpoints. A non-finite loss
// aborts with the last good checkpoint retained on disk. When `opt_in` is
// given (a checkpointed optimizer state) the run continues from its step
// counter with the same trajectory as an uninterrupted run.
TrainResult train_phase(const Dataset& ds, const OceanGrid& grid, const OceanGraph& graph,
                        const NormStats& stats, const ModelConfig& cfg, const TrainConfig& tc,
                        ParamStore<float>& params, const std::string& config_json,
                        AdamWState<float>* opt_in = nullptr);

}  // namespace ocean
