#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oceancast/fields.hpp"
#include "oceancast/stats.hpp"

namespace ocean {

// Geographic box; the longitude interval may wrap across 0. `extent` keeps
// the bounds as written in the source material for snapshot checks.
struct Region {
  std::string name;
  double lon_min = 0, lon_max = 360;  // degrees east, [0, 360)
  double lat_min = -90, lat_max = 90;
  std::string extent;

  bool contains(double lat_deg, double lon_deg) const;
};

// Regional RMSE boxes: Gulf Stream, Kuroshio Extension, South China Sea,
// Yellow Sea.
const std::vector<Region>& builtin_rmse_regions();
// Spectral boxes: North Pacific, North Atlantic.
const std::vector<Region>& builtin_spectral_regions();
const Region& find_region(const std::string& name);

// Physical-unit RMSE per selected channel over ocean cells, optionally
// restricted to a region; cell mean is unweighted unless cos_lat_weight.
std::vector<double> rmse(const FieldSet& pred, const FieldSet& truth, const OceanGrid& grid,
                         const std::vector<int>& channels, const Region* region = nullptr,
                         bool cos_lat_weight = false);

// One RMSE per depth level of a multi-level variable, shallow to deep.
struct DepthRmse {
  double depth_m;
  double value;
};
std::vector<DepthRmse> rmse_depth_profile(const FieldSet& pred, const FieldSet& truth,
                                          const OceanGrid& grid, const std::string& variable,
                                          const Region* region = nullptr);

// Surface kinetic-energy spectrum over a region: per latitude row, remove the
// row mean, window, DFT along longitude, KE(k) = (|u_k|^2 + |v_k|^2)/2 with
// one-sided mean-square normalization, averaged over rows. Rows containing
// land are dropped; wavenumbers are cycles per degree of longitude.
struct SpectrumResult {
  std::vector<double> wavenumber;
  std::vector<double> amplitude;
  std::string region;
  int lead = 0;
  int rows_used = 0;
};

enum class SpectrumWindow { Hann, None };

SpectrumResult ke_spectrum(const FieldSet& state, int u_channel, int v_channel,
                           const OceanGrid& grid, const Region& region,
                           SpectrumWindow window = SpectrumWindow::Hann);

// Per-lead RMSE (normalized units, sqrt of masked MSE) of the persistence
// forecast and of the day-of-year climatology state.
struct BaselineCurves {
  std::vector<double> persistence;  // index = lead-1
  std::vector<double> climatology;
};
BaselineCurves baselines(const FieldSet& initial, const std::vector<FieldSet>& truth_by_lead,
                         const std::vector<const FieldSet*>& climatology_by_lead,
                         const NormStats& stats, const OceanGrid& grid);

}  // namespace ocean
