#include "oceancast/dataset.hpp"

#include <cinttypes>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ocean {

namespace {

std::string day_file(const std::string& dir, const char* prefix, std::int64_t day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05" PRId64 ".ogf1", prefix, day);
  return dir + "/" + buf;
}

SchemaPtr schema_from_manifest(const nlohmann::json& j) {
  auto parse_group = [](const nlohmann::json& names, std::vector<ChannelDef>& out) {
    for (const auto& n : names) {
      const std::string name = n.get<std::string>();
      const auto at = name.find('@');
      ChannelDef d;
      d.name = name;
      d.variable = name.substr(0, at);
      const std::string lvl = at == std::string::npos ? "surface" : name.substr(at + 1);
      d.depth_m = lvl == "surface" ? std::numeric_limits<double>::quiet_NaN() : std::stod(lvl);
      out.push_back(std::move(d));
    }
  };
  auto s = std::make_shared<ChannelSchema>();
  parse_group(j.at("state"), s->state);
  parse_group(j.at("forcing"), s->forcing);
  parse_group(j.at("statics"), s->statics);
  return s;
}

}  // namespace

Dataset::Dataset(const std::string& dir) : dir_(dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw DataError("dataset: missing manifest.json in " + dir);
  nlohmann::json j;
  in >> j;
  manifest_raw_ = j.dump();
  schema_ = schema_from_manifest(j.at("schema"));
  first_day_ = j.value("first_day", 0);
  n_days_ = j.at("n_days").get<std::int64_t>();
  year_length_ = j.value("year_length", 365);

  auto loaded = load_fieldset(dir + "/statics.ogf1", schema_);
  statics_ = std::move(loaded.fields);

  grid_.n_lat = statics_.n_lat;
  grid_.n_lon = statics_.n_lon;
  const OceanGrid uniform = make_uniform_grid(grid_.n_lat, grid_.n_lon);
  grid_.lat = uniform.lat;
  grid_.lon = uniform.lon;
  grid_.mask = loaded.mask;
  grid_.depth.resize(grid_.cells());
  for (int i = 0; i < grid_.n_lat; ++i)
    for (int j2 = 0; j2 < grid_.n_lon; ++j2)
      grid_.depth[grid_.at(i, j2)] = statics_.at(2, i, j2);
  grid_.validate();
}

FieldSet Dataset::state(std::int64_t day) const {
  if (!has_day(day)) throw DataError("dataset: day out of range");
  auto loaded = load_fieldset(day_file(dir_, "x", day), schema_);
  if (loaded.fields.day != day) throw DataError("dataset: day stamp mismatch in state file");
  return std::move(loaded.fields);
}

FieldSet Dataset::forcing(std::int64_t day) const {
  if (!has_day(day)) throw DataError("dataset: day out of range");
  auto loaded = load_fieldset(day_file(dir_, "a", day), schema_);
  if (loaded.fields.day != day) throw DataError("dataset: day stamp mismatch in forcing file");
  return std::move(loaded.fields);
}

NormStats Dataset::load_stats() const { return load_norm_stats(dir_ + "/norm_stats.json", schema_); }

std::string Dataset::state_path(const std::string& dir, std::int64_t day) {
  return day_file(dir, "x", day);
}
std::string Dataset::forcing_path(const std::string& dir, std::int64_t day) {
  return day_file(dir, "a", day);
}

}  // namespace ocean
