#include "oceancast/rollout.hpp"

namespace ocean {

ForcingKind forcing_kind_from_name(const std::string& name) {
  if (name == "forecast") return ForcingKind::Forecast;
  if (name == "reanalysis") return ForcingKind::Reanalysis;
  if (name == "climatology") return ForcingKind::Climatology;
  throw ConfigError("unknown forcing kind: " + name);
}

std::string forcing_kind_name(ForcingKind k) {
  switch (k) {
    case ForcingKind::Forecast: return "forecast";
    case ForcingKind::Reanalysis: return "reanalysis";
    default: return "climatology";
  }
}

const FieldSet& ClimatologyTable::day_of_year(std::int64_t day) const {
  if (table_.empty()) throw DataError("climatology: empty table");
  std::int64_t doy = day % year_length_;
  if (doy < 0) doy += year_length_;
  // day 366 of a leap year in real calendars reuses day 365; with the fixed
  // synthetic year this branch is never taken but keeps the rule explicit.
  if (doy >= static_cast<std::int64_t>(table_.size()))
    doy = static_cast<std::int64_t>(table_.size()) - 1;
  return table_[static_cast<std::size_t>(doy)];
}

ClimatologyTable ClimatologyTable::build(const Dataset& ds, FieldKind kind, std::int64_t day_begin,
                                         std::int64_t day_end) {
  if (day_end <= day_begin) throw DataError("climatology: empty day range");
  ClimatologyTable t;
  t.year_length_ = ds.year_length();
  const int Y = t.year_length_;
  if (day_end - day_begin < Y) throw DataError("climatology: need at least one full year");

  std::vector<int> counts(static_cast<std::size_t>(Y), 0);
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(Y));
  t.table_.resize(static_cast<std::size_t>(Y));
  for (std::int64_t day = day_begin; day < day_end; ++day) {
    FieldSet f = kind == FieldKind::Forcing ? ds.forcing(day) : ds.state(day);
    std::int64_t doy = day % Y;
    if (doy < 0) doy += Y;
    auto& acc = sums[static_cast<std::size_t>(doy)];
    if (counts[static_cast<std::size_t>(doy)] == 0) {
      acc.assign(f.values.begin(), f.values.end());
      f.day = doy;
      t.table_[static_cast<std::size_t>(doy)] = std::move(f);
    } else {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.values[i];
    }
    counts[static_cast<std::size_t>(doy)] += 1;
  }
  for (int d = 0; d < Y; ++d) {
    if (counts[static_cast<std::size_t>(d)] == 0)
      throw DataError("climatology: day-of-year " + std::to_string(d) + " has no samples");
    auto& slot = t.table_[static_cast<std::size_t>(d)];
    for (std::size_t i = 0; i < slot.values.size(); ++i)
      slot.values[i] =
          static_cast<float>(sums[static_cast<std::size_t>(d)][i] / counts[static_cast<std::size_t>(d)]);
  }
  return t;
}

namespace {

class ReanalysisSource final : public ForcingSource {
 public:
  explicit ReanalysisSource(const Dataset& ds) : ds_(ds) {}
  ForcingKind kind() const override { return ForcingKind::Reanalysis; }
  bool covers(std::int64_t day) const override { return ds_.has_day(day); }
  FieldSet forcing(std::int64_t day, std::int64_t) const override { return ds_.forcing(day); }

 private:
  const Dataset& ds_;
};

class ClimatologySource final : public ForcingSource {
 public:
  explicit ClimatologySource(ClimatologyTable table) : table_(std::move(table)) {}
  ForcingKind kind() const override { return ForcingKind::Climatology; }
  bool covers(std::int64_t) const override { return true; }
  FieldSet forcing(std::int64_t day, std::int64_t) const override {
    FieldSet f = table_.day_of_year(day);
    f.day = day;  // valid-time stamp of the request
    return f;
  }

 private:
  ClimatologyTable table_;
};

}  // namespace

std::unique_ptr<ForcingSource> make_reanalysis_source(const Dataset& ds) {
  return std::make_unique<ReanalysisSource>(ds);
}

std::unique_ptr<ForcingSource> make_climatology_source(const Dataset& ds, std::int64_t day_begin,
                                                       std::int64_t day_end) {
  return std::make_unique<ClimatologySource>(
      ClimatologyTable::build(ds, FieldKind::Forcing, day_begin, day_end));
}

ForecastRun run_forecast(const FieldSet& x_init_prev, const FieldSet& x_init,
                         const FieldSet& statics, const ForcingSource& forcing, int horizon,
                         const ModelConfig& cfg, ParamStore<float>& params,
                         const OceanGraph& graph, const GraphTensors<float>& gt,
                         const NormStats& stats, const OceanGrid& grid) {
  if (horizon < 1) throw ConfigError("run_forecast: horizon must be >= 1");
  if (x_init.day != x_init_prev.day + 1)
    throw DataError("run_forecast: initial states must be consecutive days");
  const std::int64_t t0 = x_init.day;
  for (std::int64_t d = t0 - 1; d <= t0 + horizon; ++d)
    if (!forcing.covers(d))
      throw DataError("run_forecast: forcing gap at day " + std::to_string(d));

  ForecastRun run;
  run.init_day = t0;
  run.horizon = horizon;
  run.forcing = forcing.kind();
  run.predictions.reserve(static_cast<std::size_t>(horizon));

  const FieldSet* x_prev = &x_init_prev;
  const FieldSet* x_cur = &x_init;
  FieldSet a_prev = forcing.forcing(t0 - 1, t0);
  FieldSet a_cur = forcing.forcing(t0, t0);
  for (int k = 0; k < horizon; ++k) {
    FieldSet a_next = forcing.forcing(t0 + k + 1, t0);
    FieldSet pred;
    try {
      pred = model_step(cfg, params, graph, gt, *x_prev, *x_cur, a_prev, a_cur, a_next, statics,
                        stats, grid);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (lead " + std::to_string(k + 1) + ")");
    }
    run.predictions.push_back(std::move(pred));
    const std::size_t n = run.predictions.size();
    x_prev = n >= 2 ? &run.predictions[n - 2] : x_cur;
    x_cur = &run.predictions.back();
    a_prev = std::move(a_cur);
    a_cur = std::move(a_next);
  }
  return run;
}

}  // namespace ocean
