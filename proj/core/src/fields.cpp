#include "oceancast/fields.hpp"

#include <cmath>

#include "oceancast/binio.hpp"

namespace ocean {

std::vector<std::uint32_t> OceanGrid::ocean_cells() const {
  std::vector<std::uint32_t> out;
  for (std::size_t c = 0; c < cells(); ++c)
    if (mask[c]) out.push_back(static_cast<std::uint32_t>(c));
  return out;
}

std::vector<UnitVec3> OceanGrid::cell_positions() const {
  std::vector<UnitVec3> pos(cells());
  for (int i = 0; i < n_lat; ++i)
    for (int j = 0; j < n_lon; ++j) pos[at(i, j)] = from_lat_lon_deg(lat[i], lon[j]);
  return pos;
}

void OceanGrid::validate() const {
  if (n_lat <= 0 || n_lon <= 0) throw ConfigError("grid: dimensions must be positive");
  if (static_cast<int>(lat.size()) != n_lat || static_cast<int>(lon.size()) != n_lon ||
      mask.size() != cells() || depth.size() != cells())
    throw ConfigError("grid: inconsistent array sizes");
  for (int i = 0; i < n_lat; ++i) {
    if (lat[i] <= -90.0 || lat[i] >= 90.0) throw ConfigError("grid: latitude outside (-90, 90)");
    if (i > 0 && lat[i] <= lat[i - 1]) throw ConfigError("grid: latitudes not increasing");
  }
  for (int j = 0; j < n_lon; ++j)
    if (lon[j] < 0.0 || lon[j] >= 360.0) throw ConfigError("grid: longitude outside [0, 360)");
  bool any_ocean = false;
  for (std::size_t c = 0; c < cells(); ++c) {
    if (mask[c]) any_ocean = true;
    if (depth[c] < 0.0) throw DataError("grid: negative depth");
    if (depth[c] > 0.0 && !mask[c]) throw DataError("grid: positive depth on land");
  }
  if (!any_ocean) throw DataError("grid: no ocean cells");
}

OceanGrid make_uniform_grid(int n_lat, int n_lon) {
  if (n_lat < 2 || n_lon < 2) throw ConfigError("make_uniform_grid: degenerate grid");
  OceanGrid g;
  g.n_lat = n_lat;
  g.n_lon = n_lon;
  const double dlat = 180.0 / n_lat;
  const double dlon = 360.0 / n_lon;
  g.lat.resize(n_lat);
  g.lon.resize(n_lon);
  for (int i = 0; i < n_lat; ++i) g.lat[i] = -90.0 + dlat * (i + 0.5);
  for (int j = 0; j < n_lon; ++j) g.lon[j] = dlon * j;
  g.mask.assign(g.cells(), true);
  g.depth.assign(g.cells(), 4000.0);
  return g;
}

bool ChannelSchema::same_as(const ChannelSchema& o) const {
  auto eq = [](const std::vector<ChannelDef>& a, const std::vector<ChannelDef>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].name != b[i].name) return false;
    return true;
  };
  return eq(state, o.state) && eq(forcing, o.forcing) && eq(statics, o.statics);
}

const std::vector<double>& standard_depth_levels() {
  static const std::vector<double> levels = {
      0.49,   2.65,   5.08,   7.93,   11.41,  15.81,  21.60,  29.44,
      40.34,  55.76,  77.85,  92.32,  109.73, 130.67, 155.85, 186.13,
      222.48, 266.04, 318.13, 380.21, 453.94, 541.09, 643.57};
  return levels;
}

namespace {

std::string level_name(const std::string& var, double depth_m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s@%.2f", var.c_str(), depth_m);
  return buf;
}

void append_leveled(std::vector<ChannelDef>& out, const std::string& var,
                    const std::vector<double>& levels) {
  for (double d : levels) out.push_back({level_name(var, d), var, d});
}

constexpr double kSurface = std::numeric_limits<double>::quiet_NaN();

std::vector<ChannelDef> forcing_channels_full() {
  std::vector<ChannelDef> a;
  for (const char* n : {"u10", "v10", "precip", "t2m", "d2m", "ssr", "str", "slhf", "sshf", "msl"})
    a.push_back({std::string(n) + "@surface", n, kSurface});
  return a;
}

std::vector<ChannelDef> static_channels() {
  return {{"lat@surface", "lat", kSurface},
          {"lon@surface", "lon", kSurface},
          {"depth@surface", "depth", kSurface}};
}

}  // namespace

SchemaPtr full_schema() {
  auto s = std::make_shared<ChannelSchema>();
  for (const char* var : {"thetao", "uo", "vo", "so"})
    append_leveled(s->state, var, standard_depth_levels());
  s->state.push_back({"zos@surface", "zos", kSurface});
  s->forcing = forcing_channels_full();
  s->statics = static_channels();
  return s;
}

SchemaPtr toy_schema(int levels) {
  if (levels < 1 || levels > static_cast<int>(standard_depth_levels().size()))
    throw ConfigError("toy_schema: bad level count");
  std::vector<double> depths(standard_depth_levels().begin(),
                             standard_depth_levels().begin() + levels);
  auto s = std::make_shared<ChannelSchema>();
  for (const char* var : {"thetao", "uo", "vo", "so"}) append_leveled(s->state, var, depths);
  s->state.push_back({"zos@surface", "zos", kSurface});
  s->forcing = {{"u10@surface", "u10", kSurface}, {"v10@surface", "v10", kSurface}};
  s->statics = static_channels();
  return s;
}

FieldSet make_fieldset(SchemaPtr schema, FieldKind kind, const OceanGrid& grid, std::int64_t day) {
  FieldSet f;
  f.schema = std::move(schema);
  f.kind = kind;
  f.n_lat = grid.n_lat;
  f.n_lon = grid.n_lon;
  f.day = day;
  f.values.assign(static_cast<std::size_t>(f.channels()) * grid.cells(),
                  kind == FieldKind::State ? FieldSet::kLandFill : 0.0f);
  return f;
}

FieldSet make_statics(SchemaPtr schema, const OceanGrid& grid) {
  FieldSet f = make_fieldset(std::move(schema), FieldKind::Static, grid, 0);
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      f.at(0, i, j) = static_cast<float>(grid.lat[i]);
      f.at(1, i, j) = static_cast<float>(grid.lon[j]);
      f.at(2, i, j) = static_cast<float>(grid.depth[grid.at(i, j)]);
    }
  return f;
}

void validate_fieldset(const FieldSet& f, const OceanGrid& grid) {
  if (f.n_lat != grid.n_lat || f.n_lon != grid.n_lon)
    throw DataError("fieldset/grid dimension mismatch");
  const bool is_state = f.kind == FieldKind::State;
  for (int c = 0; c < f.channels(); ++c)
    for (int i = 0; i < f.n_lat; ++i)
      for (int j = 0; j < f.n_lon; ++j) {
        const float v = f.at(c, i, j);
        if (grid.mask[grid.at(i, j)] || !is_state) {
          if (!std::isfinite(v)) throw DataError("non-finite value on ocean cell");
        }
      }
}

void save_fieldset(const FieldSet& f, const OceanGrid& grid, const std::string& path) {
  binio::Writer w(path);
  w.magic("OGF1");
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(f.n_lat));
  w.u32(static_cast<std::uint32_t>(f.n_lon));
  w.u32(static_cast<std::uint32_t>(f.channels()));
  w.i64(f.day);
  w.u16(static_cast<std::uint16_t>(f.kind));
  const auto& defs = f.schema->channels(f.kind);
  for (const auto& d : defs) w.str(d.name);
  // mask bitset, row-major, byte-padded
  const std::size_t n = grid.cells();
  std::vector<std::uint8_t> bits((n + 7) / 8, 0);
  for (std::size_t c = 0; c < n; ++c)
    if (grid.mask[c]) bits[c / 8] |= static_cast<std::uint8_t>(1u << (c % 8));
  w.vec(bits);
  w.vec(f.values);
  w.close();
}

namespace {

ChannelDef parse_channel_name(const std::string& name) {
  ChannelDef d;
  d.name = name;
  const auto at = name.find('@');
  d.variable = name.substr(0, at);
  const std::string lvl = at == std::string::npos ? "surface" : name.substr(at + 1);
  d.depth_m = lvl == "surface" ? std::numeric_limits<double>::quiet_NaN() : std::stod(lvl);
  return d;
}

}  // namespace

LoadedField load_fieldset(const std::string& path, SchemaPtr schema_hint) {
  binio::Reader r(path);
  r.expect_magic("OGF1");
  if (r.u16() != 1) throw DataError(path + ": unsupported OGF1 version");
  LoadedField out;
  FieldSet& f = out.fields;
  f.n_lat = static_cast<int>(r.u32());
  f.n_lon = static_cast<int>(r.u32());
  const int channels = static_cast<int>(r.u32());
  f.day = r.i64();
  f.kind = static_cast<FieldKind>(r.u16());
  std::vector<std::string> names(channels);
  for (auto& n : names) n = r.str();

  if (schema_hint) {
    const auto& defs = schema_hint->channels(f.kind);
    if (static_cast<int>(defs.size()) != channels)
      throw DataError(path + ": channel count does not match schema");
    for (int c = 0; c < channels; ++c)
      if (defs[c].name != names[c]) throw DataError(path + ": channel name mismatch: " + names[c]);
    f.schema = std::move(schema_hint);
  } else {
    auto s = std::make_shared<ChannelSchema>();
    auto& group = f.kind == FieldKind::State   ? s->state
                  : f.kind == FieldKind::Forcing ? s->forcing
                                                 : s->statics;
    for (const auto& n : names) group.push_back(parse_channel_name(n));
    f.schema = std::move(s);
  }

  const std::size_t n = static_cast<std::size_t>(f.n_lat) * f.n_lon;
  const auto bits = r.vec<std::uint8_t>((n + 7) / 8);
  out.mask.resize(n);
  for (std::size_t c = 0; c < n; ++c) out.mask[c] = (bits[c / 8] >> (c % 8)) & 1u;
  f.values = r.vec<float>(static_cast<std::size_t>(channels) * n);
  return out;
}

}  // namespace ocean
