#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "oceancast/common.hpp"
#include "oceancast/geometry.hpp"

namespace ocean {

// Latitude-longitude grid with land/sea mask and bathymetry. Cell centers:
// lat strictly increasing inside (-90, 90), lon uniform over [0, 360).
struct OceanGrid {
  int n_lat = 0, n_lon = 0;
  std::vector<double> lat;    // degrees, size n_lat
  std::vector<double> lon;    // degrees, size n_lon
  std::vector<bool> mask;     // row-major [lat][lon], true = ocean
  std::vector<double> depth;  // meters, 0 on land

  std::size_t cells() const { return static_cast<std::size_t>(n_lat) * n_lon; }
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * n_lon + j; }

  // Ocean-cell enumeration in fixed row-major (lat, lon) order; every module
  // that flattens grid fields to node rows uses this order.
  std::vector<std::uint32_t> ocean_cells() const;
  std::vector<UnitVec3> cell_positions() const;

  void validate() const;
};

// Uniform grid with cell-centered latitudes and lon starting at 0.
OceanGrid make_uniform_grid(int n_lat, int n_lon);

enum class FieldKind { State, Forcing, Static };

struct ChannelDef {
  std::string name;      // e.g. "thetao@0.49" or "zos@surface"
  std::string variable;  // e.g. "thetao"
  double depth_m;        // NaN for surface-only channels
};

// Fixed channel ordering for a dataset: ocean-state channels (variables x
// depth levels, plus sea surface height), surface forcing channels, statics.
struct ChannelSchema {
  std::vector<ChannelDef> state;
  std::vector<ChannelDef> forcing;
  std::vector<ChannelDef> statics;

  int count(FieldKind k) const {
    switch (k) {
      case FieldKind::State: return static_cast<int>(state.size());
      case FieldKind::Forcing: return static_cast<int>(forcing.size());
      default: return static_cast<int>(statics.size());
    }
  }
  const std::vector<ChannelDef>& channels(FieldKind k) const {
    switch (k) {
      case FieldKind::State: return state;
      case FieldKind::Forcing: return forcing;
      default: return statics;
    }
  }
  bool same_as(const ChannelSchema& o) const;
};

using SchemaPtr = std::shared_ptr<const ChannelSchema>;

// The production schema: temperature, eastward/northward current and salinity
// on the 23 standard depth levels plus sea surface height (93 state
// channels), 10 surface forcing channels, 3 statics.
SchemaPtr full_schema();
const std::vector<double>& standard_depth_levels();  // 23 values, meters

// Small schema for tests and the synthetic benchmark: the four surface state
// variables plus SSH at `levels` depth levels, 10m winds as forcing.
SchemaPtr toy_schema(int levels = 1);

// Channel-stacked gridded values for one kind at one day stamp. State
// channels carry NaN on land cells; forcing and statics are defined
// everywhere.
struct FieldSet {
  SchemaPtr schema;
  FieldKind kind = FieldKind::State;
  int n_lat = 0, n_lon = 0;
  std::int64_t day = 0;
  std::vector<float> values;  // [channel][lat][lon]

  static constexpr float kLandFill = std::numeric_limits<float>::quiet_NaN();

  int channels() const { return schema ? schema->count(kind) : 0; }
  std::size_t plane() const { return static_cast<std::size_t>(n_lat) * n_lon; }
  float& at(int c, int i, int j) { return values[c * plane() + static_cast<std::size_t>(i) * n_lon + j]; }
  float at(int c, int i, int j) const { return values[c * plane() + static_cast<std::size_t>(i) * n_lon + j]; }
};

FieldSet make_fieldset(SchemaPtr schema, FieldKind kind, const OceanGrid& grid, std::int64_t day);

// Statics fieldset (latitude, longitude, ocean depth channels) for a grid.
FieldSet make_statics(SchemaPtr schema, const OceanGrid& grid);

// Checks the land-fill / finiteness invariants against a grid mask.
void validate_fieldset(const FieldSet& f, const OceanGrid& grid);

// "OGF1" field files: magic, version u16, n_lat/n_lon/channels u32, day i64,
// kind u16, channel name table, mask bitset, channel-major f32 values.
void save_fieldset(const FieldSet& f, const OceanGrid& grid, const std::string& path);
struct LoadedField {
  FieldSet fields;
  std::vector<bool> mask;
};
LoadedField load_fieldset(const std::string& path, SchemaPtr schema_hint = nullptr);

}  // namespace ocean
