#include "oceancast/stats.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ocean {

namespace {

// Welford accumulator; the tests cross-check against a plain two-pass oracle.
struct Moments {
  double n = 0, mean = 0, m2 = 0;
  void add(double v) {
    n += 1;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double std_floored() const {
    const double var = n > 0 ? m2 / n : 0.0;
    return std::max(std::sqrt(var), NormStats::kStdFloor);
  }
};

}  // namespace

NormStats compute_norm_stats(const std::vector<DaySample>& days, const FieldSet& statics,
                             const OceanGrid& grid) {
  if (days.size() < 2) throw DataError("compute_norm_stats: need at least two consecutive days");
  for (const auto& d : days)
    if (!d.state || !d.forcing) throw DataError("compute_norm_stats: incomplete day sample");

  const SchemaPtr schema = days.front().state->schema;
  const int cx = schema->count(FieldKind::State);
  const int ca = schema->count(FieldKind::Forcing);
  const int cs = schema->count(FieldKind::Static);

  std::vector<Moments> mx(cx), ma(ca), ms(cs), mdiff(cx);
  const auto ocean = grid.ocean_cells();

  for (const auto& day : days) {
    const FieldSet& x = *day.state;
    const FieldSet& a = *day.forcing;
    for (int c = 0; c < cx; ++c) {
      const float* plane = &x.values[static_cast<std::size_t>(c) * x.plane()];
      for (auto cell : ocean) mx[c].add(plane[cell]);
    }
    for (int c = 0; c < ca; ++c) {
      const float* plane = &a.values[static_cast<std::size_t>(c) * a.plane()];
      for (std::size_t cell = 0; cell < a.plane(); ++cell) ma[c].add(plane[cell]);
    }
  }
  for (int c = 0; c < cs; ++c) {
    const float* plane = &statics.values[static_cast<std::size_t>(c) * statics.plane()];
    for (std::size_t cell = 0; cell < statics.plane(); ++cell) ms[c].add(plane[cell]);
  }
  for (std::size_t d = 0; d + 1 < days.size(); ++d) {
    const FieldSet& x0 = *days[d].state;
    const FieldSet& x1 = *days[d + 1].state;
    if (x1.day != x0.day + 1)
      throw DataError("compute_norm_stats: days not consecutive for difference stats");
    for (int c = 0; c < cx; ++c) {
      const float* p0 = &x0.values[static_cast<std::size_t>(c) * x0.plane()];
      const float* p1 = &x1.values[static_cast<std::size_t>(c) * x1.plane()];
      for (auto cell : ocean) mdiff[c].add(static_cast<double>(p1[cell]) - p0[cell]);
    }
  }

  NormStats st;
  st.schema = schema;
  for (auto& m : mx) {
    st.mean_state.push_back(m.mean);
    st.std_state.push_back(m.std_floored());
  }
  for (auto& m : ma) {
    st.mean_forcing.push_back(m.mean);
    st.std_forcing.push_back(m.std_floored());
  }
  for (auto& m : ms) {
    st.mean_static.push_back(m.mean);
    st.std_static.push_back(m.std_floored());
  }
  for (auto& m : mdiff) st.diff_std.push_back(m.std_floored());
  for (double v : st.mean_state)
    if (!std::isfinite(v)) throw NumericError("compute_norm_stats: non-finite mean");
  return st;
}

FieldSet normalize(const FieldSet& fields, const NormStats& stats) {
  if (!fields.schema->same_as(*stats.schema)) throw DataError("normalize: schema mismatch");
  FieldSet out = fields;
  const auto& mean = stats.mean(fields.kind);
  const auto& dev = stats.dev(fields.kind);
  for (int c = 0; c < fields.channels(); ++c) {
    float* plane = &out.values[static_cast<std::size_t>(c) * out.plane()];
    const float m = static_cast<float>(mean[c]);
    const float inv = static_cast<float>(1.0 / dev[c]);
    for (std::size_t i = 0; i < out.plane(); ++i) plane[i] = (plane[i] - m) * inv;
  }
  return out;
}

std::vector<float> denormalize_delta(const std::vector<float>& delta, const NormStats& stats) {
  const std::size_t cx = stats.diff_std.size();
  if (cx == 0 || delta.size() % cx != 0) throw DataError("denormalize_delta: bad shape");
  std::vector<float> out(delta.size());
  const std::size_t rows = delta.size() / cx;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cx; ++c)
      out[r * cx + c] = delta[r * cx + c] * static_cast<float>(stats.diff_std[c]);
  return out;
}

namespace {

nlohmann::json group_json(const std::vector<ChannelDef>& defs, const std::vector<double>& mean,
                          const std::vector<double>& dev) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t c = 0; c < defs.size(); ++c)
    j[defs[c].name] = {{"mean", mean[c]}, {"std", dev[c]}};
  return j;
}

void read_group(const nlohmann::json& j, const std::vector<ChannelDef>& defs,
                std::vector<double>& mean, std::vector<double>& dev) {
  for (const auto& d : defs) {
    if (!j.contains(d.name)) throw DataError("norm stats: missing channel " + d.name);
    mean.push_back(j.at(d.name).at("mean").get<double>());
    dev.push_back(j.at(d.name).at("std").get<double>());
  }
}

}  // namespace

void save_norm_stats(const NormStats& stats, const std::string& path) {
  nlohmann::json j;
  j["levels"]["state"] = group_json(stats.schema->state, stats.mean_state, stats.std_state);
  j["levels"]["forcing"] = group_json(stats.schema->forcing, stats.mean_forcing, stats.std_forcing);
  j["levels"]["static"] = group_json(stats.schema->statics, stats.mean_static, stats.std_static);
  nlohmann::json diffs = nlohmann::json::object();
  for (std::size_t c = 0; c < stats.schema->state.size(); ++c)
    diffs[stats.schema->state[c].name] = stats.diff_std[c];
  j["diffs"] = diffs;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

NormStats load_norm_stats(const std::string& path, SchemaPtr schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  NormStats st;
  st.schema = std::move(schema);
  read_group(j.at("levels").at("state"), st.schema->state, st.mean_state, st.std_state);
  read_group(j.at("levels").at("forcing"), st.schema->forcing, st.mean_forcing, st.std_forcing);
  read_group(j.at("levels").at("static"), st.schema->statics, st.mean_static, st.std_static);
  for (const auto& d : st.schema->state) st.diff_std.push_back(j.at("diffs").at(d.name).get<double>());
  return st;
}

}  // namespace ocean
