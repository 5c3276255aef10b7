#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "oceancast/dataset.hpp"
#include "oceancast/rollout.hpp"

namespace ocean {

// Deterministic analytic toy ocean: drifting Gaussian eddies (SSH plus
// geostrophically-consistent currents), a smooth temperature/salinity
// background with a seasonal cycle, and a surface-current component driven by
// the running sum of a rotating wind pattern, so that the one-day current
// tendency contains exactly `coupling` times the wind of the new day.
struct GeneratorConfig {
  int n_lat = 90, n_lon = 180;  // 2 degree grid
  int levels = 1;               // depth levels of the toy schema
  std::uint64_t seed = 2024;
  int eddy_count = 40;
  double eddy_radius_min_deg = 6.0, eddy_radius_max_deg = 14.0;
  double eddy_amp = 0.18;                // m of SSH
  double drift_min_deg_day = 0.25, drift_max_deg_day = 0.7;
  double wind_amp = 6.0;                 // m/s
  double wind_period_days = 9.0;
  double coupling = 0.02;                // current gain on the wind running sum
  std::string mask_mode = "continents";  // "continents" | "none"
  double fcst_tau_days = 3.0;            // forecast-product decay toward climatology
  double fcst_noise = 0.25;              // relative noise on the degraded wind
  int year_length = 365;
};

GeneratorConfig generator_config_from_json(const std::string& json_text);

OceanGrid synthetic_grid(const GeneratorConfig& cfg);
SchemaPtr synthetic_schema(const GeneratorConfig& cfg);

// Closed-form fields for one day; pure functions of (config, day).
FieldSet synthetic_state(const GeneratorConfig& cfg, const OceanGrid& grid, SchemaPtr schema,
                         std::int64_t day);
FieldSet synthetic_forcing(const GeneratorConfig& cfg, const OceanGrid& grid, SchemaPtr schema,
                           std::int64_t day);

// Writes statics plus n_days of state/forcing files, norm stats over the
// first year, and manifest.json with the config echoed (the truth metadata).
void generate_dataset(const GeneratorConfig& cfg, int n_days, const std::string& out_dir);

// Degraded "forecast" forcing: exact at and before the initialization day,
// then blended toward the forcing climatology with lead-growing noise.
std::unique_ptr<ForcingSource> make_forecast_source(const Dataset& ds, const GeneratorConfig& cfg,
                                                    std::int64_t clim_day_begin,
                                                    std::int64_t clim_day_end);

// Reads the generator config back from a dataset manifest (for the forecast
// forcing source and the tests' analytic oracles).
GeneratorConfig generator_config_from_manifest(const Dataset& ds);

}  // namespace ocean
