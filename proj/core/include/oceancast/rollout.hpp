#pragma once

#include <memory>
#include <vector>

#include "oceancast/dataset.hpp"
#include "oceancast/model.hpp"

namespace ocean {

enum class ForcingKind { Forecast, Reanalysis, Climatology };

ForcingKind forcing_kind_from_name(const std::string& name);
std::string forcing_kind_name(ForcingKind k);

// Supplier of atmospheric fields for a rollout. `init_day` is the forecast
// initialization; sources whose realism depends on lead time (the degraded
// forecast product) use it, the others ignore it.
class ForcingSource {
 public:
  virtual ~ForcingSource() = default;
  virtual ForcingKind kind() const = 0;
  virtual bool covers(std::int64_t day) const = 0;
  virtual FieldSet forcing(std::int64_t day, std::int64_t init_day) const = 0;
};

// Day-of-year mean fields over a span of days. A 366th day-of-year reuses
// day 365. Works for forcing and (as the climatology baseline) state files.
class ClimatologyTable {
 public:
  ClimatologyTable() = default;
  int year_length() const { return year_length_; }
  const FieldSet& day_of_year(std::int64_t day) const;

  // Mean over all full or partial years covered by [day_begin, day_end).
  static ClimatologyTable build(const Dataset& ds, FieldKind kind, std::int64_t day_begin,
                                std::int64_t day_end);

 private:
  int year_length_ = 365;
  std::vector<FieldSet> table_;
};

std::unique_ptr<ForcingSource> make_reanalysis_source(const Dataset& ds);
// Requires at least one full year of forcing in [day_begin, day_end).
std::unique_ptr<ForcingSource> make_climatology_source(const Dataset& ds, std::int64_t day_begin,
                                                       std::int64_t day_end);

// Rollout output: T predicted states plus provenance.
struct ForecastRun {
  std::int64_t init_day = 0;
  int horizon = 0;
  ForcingKind forcing = ForcingKind::Reanalysis;
  std::vector<FieldSet> predictions;  // lead 1..T, day stamps init_day + k
};

// Autoregressive rollout: step k consumes the previous two states (initial
// conditions for the first step) and the forcing triplet for days
// (t+k-1, t+k, t+k+1). Forcing coverage is checked before any compute.
ForecastRun run_forecast(const FieldSet& x_init_prev, const FieldSet& x_init,
                         const FieldSet& statics, const ForcingSource& forcing, int horizon,
                         const ModelConfig& cfg, ParamStore<float>& params,
                         const OceanGraph& graph, const GraphTensors<float>& gt,
                         const NormStats& stats, const OceanGrid& grid);

}  // namespace ocean
