#pragma once

#include <string>
#include <vector>

#include "oceancast/fields.hpp"

namespace ocean {

// Per-channel normalization statistics: level mean/std for every channel of
// every kind, plus the standard deviation of one-step differences for each
// ocean-state channel (the residual output scale).
struct NormStats {
  SchemaPtr schema;
  std::vector<double> mean_state, std_state;
  std::vector<double> mean_forcing, std_forcing;
  std::vector<double> mean_static, std_static;
  std::vector<double> diff_std;  // per state channel

  static constexpr double kStdFloor = 1e-6;

  const std::vector<double>& mean(FieldKind k) const {
    return k == FieldKind::State ? mean_state : k == FieldKind::Forcing ? mean_forcing : mean_static;
  }
  const std::vector<double>& dev(FieldKind k) const {
    return k == FieldKind::State ? std_state : k == FieldKind::Forcing ? std_forcing : std_static;
  }
};

// One day of the training archive, as used for statistics.
struct DaySample {
  const FieldSet* state = nullptr;
  const FieldSet* forcing = nullptr;
};

// Statistics over ocean cells for state channels and over all cells for
// forcing/static channels; one-step difference stds over consecutive days.
// Requires at least two consecutive time steps.
NormStats compute_norm_stats(const std::vector<DaySample>& days, const FieldSet& statics,
                             const OceanGrid& grid);

// (v - mean) / std per channel; land fill values are left untouched.
FieldSet normalize(const FieldSet& fields, const NormStats& stats);

// Scale a normalized residual by the per-channel difference std. `delta` is
// row-major [rows x state channels]; rows enumerate ocean cells.
std::vector<float> denormalize_delta(const std::vector<float>& delta, const NormStats& stats);

void save_norm_stats(const NormStats& stats, const std::string& path);
NormStats load_norm_stats(const std::string& path, SchemaPtr schema);

}  // namespace ocean
