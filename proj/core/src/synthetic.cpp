#include "oceancast/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "oceancast/binio.hpp"
#include "oceancast/common.hpp"

namespace ocean {

namespace {

constexpr double kDeg = M_PI / 180.0;

struct Eddy {
  double lat0, lon0;     // initial center, degrees
  double amp;            // SSH amplitude, m (signed)
  double radius_rad;     // Gaussian radius, radians of arc
  double drift_deg_day;  // westward drift
  double wobble_amp_deg;
  double wobble_period;
  double wobble_phase;
};

std::vector<Eddy> make_eddies(const GeneratorConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Eddy> eddies;
  eddies.reserve(static_cast<std::size_t>(cfg.eddy_count));
  for (int e = 0; e < cfg.eddy_count; ++e) {
    Eddy ed;
    // keep centers away from the poles so drift along latitude stays tame
    ed.lat0 = -60.0 + 120.0 * u01(rng);
    ed.lon0 = 360.0 * u01(rng);
    ed.amp = (e % 2 == 0 ? 1.0 : -1.0) * cfg.eddy_amp * (0.6 + 0.8 * u01(rng));
    const double r_deg =
        cfg.eddy_radius_min_deg + (cfg.eddy_radius_max_deg - cfg.eddy_radius_min_deg) * u01(rng);
    ed.radius_rad = r_deg * kDeg;
    ed.drift_deg_day = cfg.drift_min_deg_day + (cfg.drift_max_deg_day - cfg.drift_min_deg_day) * u01(rng);
    ed.wobble_amp_deg = 2.0 + 2.0 * u01(rng);
    ed.wobble_period = 40.0 + 50.0 * u01(rng);
    ed.wobble_phase = 2.0 * M_PI * u01(rng);
    eddies.push_back(ed);
  }
  return eddies;
}

struct EddyCenter {
  UnitVec3 pos;
  double amp;
  double radius_rad;
};

std::vector<EddyCenter> eddy_centers(const std::vector<Eddy>& eddies, double t) {
  std::vector<EddyCenter> out;
  out.reserve(eddies.size());
  for (const auto& e : eddies) {
    const double lon = e.lon0 - e.drift_deg_day * t;  // westward
    const double lat =
        e.lat0 + e.wobble_amp_deg * std::sin(2.0 * M_PI * t / e.wobble_period + e.wobble_phase);
    out.push_back({from_lat_lon_deg(lat, lon), e.amp, e.radius_rad});
  }
  return out;
}

// SSH and its analytic tangent-plane gradient (east/north components) from
// the eddy field, truncated where the Gaussian is below ~4e-6.
struct SshSample {
  double eta = 0.0;
  double d_east = 0.0;
  double d_north = 0.0;
};

SshSample ssh_at(const std::vector<EddyCenter>& centers, const UnitVec3& p, double lat_rad,
                 double lon_rad) {
  SshSample s;
  const double clat = std::cos(lat_rad), slat = std::sin(lat_rad);
  const double clon = std::cos(lon_rad), slon = std::sin(lon_rad);
  const UnitVec3 east{-slon, clon, 0.0};
  const UnitVec3 north{-slat * clon, -slat * slon, clat};
  for (const auto& c : centers) {
    const double d = geodesic_distance(p, c.pos);
    const double q = d / c.radius_rad;
    if (q * q > 12.5) continue;
    const double g = c.amp * std::exp(-q * q);
    s.eta += g;
    if (d < 1e-9) continue;  // gradient vanishes at the center
    // unit tangent pointing away from the eddy center
    const double pc = p.dot(c.pos);
    UnitVec3 away{c.pos.x - pc * p.x, c.pos.y - pc * p.y, c.pos.z - pc * p.z};
    const double an = away.norm();
    if (an < 1e-12) continue;
    const double dgrad = g * (-2.0 * d / (c.radius_rad * c.radius_rad));
    // d(dist)/d(move toward center) = -1, so grad = dgrad * (-away/|away|)
    s.d_east += dgrad * (-(away.x * east.x + away.y * east.y + away.z * east.z) / an);
    s.d_north += dgrad * (-(away.x * north.x + away.y * north.y + away.z * north.z) / an);
  }
  return s;
}

// Smooth odd Coriolis-like factor: zero at the equator, bounded elsewhere.
double geo_coef(double lat_rad) {
  const double s = std::sin(lat_rad);
  return 0.9 * s / (s * s + 0.09);
}

struct WindSample {
  double u, v;
};

// Rotating wind pattern: each point sees a sinusoid in time, so the running
// sum stays bounded and has a closed form.
WindSample wind_at(const GeneratorConfig& cfg, double lat_rad, double lon_rad, double t) {
  const double omega = 2.0 * M_PI / cfg.wind_period_days;
  const double env = 0.6 + 0.4 * std::cos(2.0 * lat_rad);
  const double phase = omega * t - lon_rad;
  return {cfg.wind_amp * env * std::cos(phase), cfg.wind_amp * env * std::sin(phase + 0.7)};
}

// Sum_{s=1}^{t} cos/sin(omega*s + theta) in closed form (Dirichlet kernel).
double cos_running_sum(double omega, double theta, double t) {
  if (t < 1.0) return 0.0;
  const double half = 0.5 * omega;
  return std::sin(t * half) / std::sin(half) * std::cos(theta + half * (t + 1.0));
}

double sin_running_sum(double omega, double theta, double t) {
  if (t < 1.0) return 0.0;
  const double half = 0.5 * omega;
  return std::sin(t * half) / std::sin(half) * std::sin(theta + half * (t + 1.0));
}

WindSample wind_sum_at(const GeneratorConfig& cfg, double lat_rad, double lon_rad, double t) {
  const double omega = 2.0 * M_PI / cfg.wind_period_days;
  const double env = 0.6 + 0.4 * std::cos(2.0 * lat_rad);
  return {cfg.wind_amp * env * cos_running_sum(omega, -lon_rad, t),
          cfg.wind_amp * env * sin_running_sum(omega, -lon_rad + 0.7, t)};
}

bool is_land(const GeneratorConfig& cfg, double lat, double lon) {
  if (cfg.mask_mode == "none") return false;
  // idealized continents; shapes fixed, independent of the seed
  if (lat < -72.0) return true;  // polar cap
  auto wrap_dist = [](double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
  };
  // western continent
  if (lat > -55.0 && lat < 62.0) {
    const double center = 275.0 + 10.0 * std::sin(lat * kDeg * 2.0);
    const double width = 26.0 + 10.0 * std::cos(lat * kDeg * 1.5);
    if (wrap_dist(lon, center) < width) return true;
  }
  // eastern continent
  if (lat > -36.0 && lat < 68.0) {
    const double center = 25.0 + 14.0 * std::sin(lat * kDeg * 1.2 + 0.8);
    const double width = 30.0 + 8.0 * std::sin(lat * kDeg * 2.2);
    if (wrap_dist(lon, center) < width) return true;
  }
  // island arc
  if (lat > -8.0 && lat < 24.0 && wrap_dist(lon, 130.0) < 7.0) return true;
  return false;
}

double bathymetry(double lat, double lon) {
  const double shelf = 0.25 + 0.75 * std::abs(std::sin(2.0 * lon * kDeg) * std::cos(lat * kDeg));
  return 4000.0 * shelf + 200.0;
}

}  // namespace

OceanGrid synthetic_grid(const GeneratorConfig& cfg) {
  if (cfg.n_lat < 8 || cfg.n_lon < 16) throw ConfigError("synthetic grid too small");
  OceanGrid g = make_uniform_grid(cfg.n_lat, cfg.n_lon);
  for (int i = 0; i < g.n_lat; ++i)
    for (int j = 0; j < g.n_lon; ++j) {
      const bool land = is_land(cfg, g.lat[i], g.lon[j]);
      g.mask[g.at(i, j)] = !land;
      g.depth[g.at(i, j)] = land ? 0.0 : bathymetry(g.lat[i], g.lon[j]);
    }
  g.validate();
  return g;
}

SchemaPtr synthetic_schema(const GeneratorConfig& cfg) { return toy_schema(cfg.levels); }

FieldSet synthetic_state(const GeneratorConfig& cfg, const OceanGrid& grid, SchemaPtr schema,
                         std::int64_t day) {
  const auto centers = eddy_centers(make_eddies(cfg), static_cast<double>(day));
  const double t = static_cast<double>(day);
  const double season = std::sin(2.0 * M_PI * t / cfg.year_length);

  FieldSet f = make_fieldset(schema, FieldKind::State, grid, day);
  const int L = cfg.levels;
  const auto& depths = standard_depth_levels();

  for (int i = 0; i < grid.n_lat; ++i) {
    const double lat_rad = grid.lat[i] * kDeg;
    for (int j = 0; j < grid.n_lon; ++j) {
      if (!grid.mask[grid.at(i, j)]) continue;
      const double lon_rad = grid.lon[j] * kDeg;
      const UnitVec3 p = from_lat_lon_deg(grid.lat[i], grid.lon[j]);
      const auto ssh = ssh_at(centers, p, lat_rad, lon_rad);
      const auto wsum = wind_sum_at(cfg, lat_rad, lon_rad, t);

      const double coef = geo_coef(lat_rad);
      const double u_surf = -coef * ssh.d_north + cfg.coupling * wsum.u;
      const double v_surf = coef * ssh.d_east + cfg.coupling * wsum.v;

      for (int l = 0; l < L; ++l) {
        const double z = depths[static_cast<std::size_t>(l)];
        const double decay = std::exp(-z / 150.0);
        const double t_val = 2.0 + 26.0 * std::cos(lat_rad) * std::cos(lat_rad) *
                                     std::exp(-z / 400.0) +
                             2.5 * season * std::sin(lat_rad) * std::exp(-z / 60.0) +
                             9.0 * ssh.eta * std::exp(-z / 120.0);
        const double s_val = 35.0 + 1.2 * std::cos(2.0 * lat_rad) * std::exp(-z / 500.0) -
                             0.4 * season * std::exp(-z / 80.0) - 2.0 * ssh.eta;
        f.at(0 * L + l, i, j) = static_cast<float>(t_val);             // thetao
        f.at(1 * L + l, i, j) = static_cast<float>(u_surf * decay);    // uo
        f.at(2 * L + l, i, j) = static_cast<float>(v_surf * decay);    // vo
        f.at(3 * L + l, i, j) = static_cast<float>(s_val);             // so
      }
      f.at(4 * L, i, j) = static_cast<float>(ssh.eta);  // zos
    }
  }
  return f;
}

FieldSet synthetic_forcing(const GeneratorConfig& cfg, const OceanGrid& grid, SchemaPtr schema,
                           std::int64_t day) {
  FieldSet f = make_fieldset(schema, FieldKind::Forcing, grid, day);
  const double t = static_cast<double>(day);
  for (int i = 0; i < grid.n_lat; ++i) {
    const double lat_rad = grid.lat[i] * kDeg;
    for (int j = 0; j < grid.n_lon; ++j) {
      const auto w = wind_at(cfg, lat_rad, grid.lon[j] * kDeg, t);
      f.at(0, i, j) = static_cast<float>(w.u);
      f.at(1, i, j) = static_cast<float>(w.v);
    }
  }
  return f;
}

namespace {

nlohmann::json generator_json(const GeneratorConfig& c) {
  return {{"n_lat", c.n_lat},
          {"n_lon", c.n_lon},
          {"levels", c.levels},
          {"seed", c.seed},
          {"eddy_count", c.eddy_count},
          {"eddy_radius_min_deg", c.eddy_radius_min_deg},
          {"eddy_radius_max_deg", c.eddy_radius_max_deg},
          {"eddy_amp", c.eddy_amp},
          {"drift_min_deg_day", c.drift_min_deg_day},
          {"drift_max_deg_day", c.drift_max_deg_day},
          {"wind_amp", c.wind_amp},
          {"wind_period_days", c.wind_period_days},
          {"coupling", c.coupling},
          {"mask_mode", c.mask_mode},
          {"fcst_tau_days", c.fcst_tau_days},
          {"fcst_noise", c.fcst_noise},
          {"year_length", c.year_length}};
}

GeneratorConfig generator_from_json_obj(const nlohmann::json& j) {
  GeneratorConfig c;
  c.n_lat = j.value("n_lat", c.n_lat);
  c.n_lon = j.value("n_lon", c.n_lon);
  c.levels = j.value("levels", c.levels);
  c.seed = j.value("seed", c.seed);
  c.eddy_count = j.value("eddy_count", c.eddy_count);
  c.eddy_radius_min_deg = j.value("eddy_radius_min_deg", c.eddy_radius_min_deg);
  c.eddy_radius_max_deg = j.value("eddy_radius_max_deg", c.eddy_radius_max_deg);
  c.eddy_amp = j.value("eddy_amp", c.eddy_amp);
  c.drift_min_deg_day = j.value("drift_min_deg_day", c.drift_min_deg_day);
  c.drift_max_deg_day = j.value("drift_max_deg_day", c.drift_max_deg_day);
  c.wind_amp = j.value("wind_amp", c.wind_amp);
  c.wind_period_days = j.value("wind_period_days", c.wind_period_days);
  c.coupling = j.value("coupling", c.coupling);
  c.mask_mode = j.value("mask_mode", c.mask_mode);
  c.fcst_tau_days = j.value("fcst_tau_days", c.fcst_tau_days);
  c.fcst_noise = j.value("fcst_noise", c.fcst_noise);
  c.year_length = j.value("year_length", c.year_length);
  return c;
}

}  // namespace

GeneratorConfig generator_config_from_json(const std::string& json_text) {
  return generator_from_json_obj(nlohmann::json::parse(json_text));
}

GeneratorConfig generator_config_from_manifest(const Dataset& ds) {
  const auto j = nlohmann::json::parse(ds.manifest_json());
  if (!j.contains("generator"))
    throw DataError("dataset manifest has no generator section (not a synthetic dataset?)");
  return generator_from_json_obj(j.at("generator"));
}

void generate_dataset(const GeneratorConfig& cfg, int n_days, const std::string& out_dir) {
  if (n_days < 3) throw ConfigError("generate_dataset: need at least 3 days");
  std::filesystem::create_directories(out_dir);
  const OceanGrid grid = synthetic_grid(cfg);
  const SchemaPtr schema = synthetic_schema(cfg);

  const FieldSet statics = make_statics(schema, grid);
  save_fieldset(statics, grid, out_dir + "/statics.ogf1");

  std::vector<FieldSet> states, forcings;
  states.reserve(static_cast<std::size_t>(n_days));
  forcings.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    states.push_back(synthetic_state(cfg, grid, schema, d));
    forcings.push_back(synthetic_forcing(cfg, grid, schema, d));
    save_fieldset(states.back(), grid, Dataset::state_path(out_dir, d));
    save_fieldset(forcings.back(), grid, Dataset::forcing_path(out_dir, d));
  }

  // Norm stats over the nominal training year.
  const int stat_days = std::min(n_days, cfg.year_length);
  std::vector<DaySample> days;
  for (int d = 0; d < stat_days; ++d) days.push_back({&states[static_cast<std::size_t>(d)],
                                                      &forcings[static_cast<std::size_t>(d)]});
  const NormStats stats = compute_norm_stats(days, statics, grid);
  save_norm_stats(stats, out_dir + "/norm_stats.json");

  nlohmann::json manifest;
  manifest["tool_version"] = kVersion;
  manifest["first_day"] = 0;
  manifest["n_days"] = n_days;
  manifest["year_length"] = cfg.year_length;
  manifest["schema"] = {{"state", nlohmann::json::array()},
                        {"forcing", nlohmann::json::array()},
                        {"statics", nlohmann::json::array()}};
  for (const auto& c : schema->state) manifest["schema"]["state"].push_back(c.name);
  for (const auto& c : schema->forcing) manifest["schema"]["forcing"].push_back(c.name);
  for (const auto& c : schema->statics) manifest["schema"]["statics"].push_back(c.name);
  manifest["generator"] = generator_json(cfg);
  std::ofstream out(out_dir + "/manifest.json");
  if (!out) throw DataError("cannot write dataset manifest");
  out << manifest.dump(2) << "\n";
}

namespace {

class SyntheticForecastSource final : public ForcingSource {
 public:
  SyntheticForecastSource(const Dataset& ds, GeneratorConfig cfg, ClimatologyTable clim)
      : ds_(ds), cfg_(std::move(cfg)), clim_(std::move(clim)) {}

  ForcingKind kind() const override { return ForcingKind::Forecast; }
  bool covers(std::int64_t day) const override { return ds_.has_day(day); }

  FieldSet forcing(std::int64_t day, std::int64_t init_day) const override {
    FieldSet truth = ds_.forcing(day);
    const std::int64_t lead = day - init_day;
    if (lead <= 0) return truth;  // analysis-valid fields up to the initialization
    const double alpha = std::exp(-static_cast<double>(lead) / cfg_.fcst_tau_days);
    const FieldSet& clim = clim_.day_of_year(day);
    const float noise_scale =
        static_cast<float>(cfg_.fcst_noise * cfg_.wind_amp * (1.0 - alpha));
    std::mt19937_64 rng(binio::fnv1a("fcst", cfg_.seed) ^
                        (static_cast<std::uint64_t>(init_day) * 0x9e3779b97f4a7c15ull) ^
                        static_cast<std::uint64_t>(day));
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    for (std::size_t i = 0; i < truth.values.size(); ++i)
      truth.values[i] = static_cast<float>(alpha * truth.values[i] +
                                           (1.0 - alpha) * clim.values[i]) +
                        noise_scale * gauss(rng);
    return truth;
  }

 private:
  const Dataset& ds_;
  GeneratorConfig cfg_;
  ClimatologyTable clim_;
};

}  // namespace

std::unique_ptr<ForcingSource> make_forecast_source(const Dataset& ds, const GeneratorConfig& cfg,
                                                    std::int64_t clim_day_begin,
                                                    std::int64_t clim_day_end) {
  return std::make_unique<SyntheticForecastSource>(
      ds, cfg, ClimatologyTable::build(ds, FieldKind::Forcing, clim_day_begin, clim_day_end));
}

}  // namespace ocean
