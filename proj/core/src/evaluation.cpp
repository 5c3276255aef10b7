#include "oceancast/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "oceancast/training.hpp"

namespace ocean {

bool Region::contains(double lat_deg, double lon_deg) const {
  if (lat_deg < lat_min || lat_deg > lat_max) return false;
  double lon = std::fmod(lon_deg, 360.0);
  if (lon < 0) lon += 360.0;
  if (lon_min <= lon_max) return lon >= lon_min && lon <= lon_max;
  return lon >= lon_min || lon <= lon_max;  // wrapped interval
}

const std::vector<Region>& builtin_rmse_regions() {
  static const std::vector<Region> regions = {
      {"gulf_stream", 284.0, 320.0, 35.0, 45.0, "76W-40W, 35N-45N"},
      {"kuroshio_extension", 120.0, 179.0, 20.0, 55.0, "120E-179E, 20N-55N"},
      {"south_china_sea", 100.0, 122.0, 0.0, 27.0, "100E-122E, 0N-27N"},
      {"yellow_sea", 118.0, 127.0, 30.0, 42.0, "118E-127E, 30N-42N"},
  };
  return regions;
}

const std::vector<Region>& builtin_spectral_regions() {
  static const std::vector<Region> regions = {
      {"north_pacific", 145.0, 175.0, 10.0, 40.0, "10N-40N, 145E-175E"},
      {"north_atlantic", 300.0, 330.0, 10.0, 40.0, "10N-40N, 60W-30W"},
  };
  return regions;
}

const Region& find_region(const std::string& name) {
  for (const auto& r : builtin_rmse_regions())
    if (r.name == name) return r;
  for (const auto& r : builtin_spectral_regions())
    if (r.name == name) return r;
  throw ConfigError("unknown region: " + name);
}

namespace {

std::vector<std::uint32_t> region_ocean_cells(const OceanGrid& grid, const Region* region) {
  std::vector<std::uint32_t> cells;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      if (!grid.mask[grid.at(i, j)]) continue;
      if (region && !region->contains(grid.lat[i], grid.lon[j])) continue;
      cells.push_back(static_cast<std::uint32_t>(grid.at(i, j)));
    }
  return cells;
}

}  // namespace

std::vector<double> rmse(const FieldSet& pred, const FieldSet& truth, const OceanGrid& grid,
                         const std::vector<int>& channels, const Region* region,
                         bool cos_lat_weight) {
  if (!pred.schema->same_as(*truth.schema)) throw DataError("rmse: schema mismatch");
  if (pred.n_lat != grid.n_lat || pred.n_lon != grid.n_lon) throw DataError("rmse: grid mismatch");
  const auto cells = region_ocean_cells(grid, region);
  if (cells.empty()) throw DataError("rmse: region contains no ocean cells");

  std::vector<double> weights(cells.size(), 1.0);
  if (cos_lat_weight)
    for (std::size_t k = 0; k < cells.size(); ++k)
      weights[k] = std::cos(grid.lat[cells[k] / grid.n_lon] * M_PI / 180.0);
  double wsum = 0.0;
  for (double w : weights) wsum += w;

  std::vector<double> out;
  out.reserve(channels.size());
  for (int c : channels) {
    if (c < 0 || c >= pred.channels()) throw DataError("rmse: channel index out of range");
    const float* p = &pred.values[static_cast<std::size_t>(c) * pred.plane()];
    const float* t = &truth.values[static_cast<std::size_t>(c) * truth.plane()];
    double acc = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double e = static_cast<double>(p[cells[k]]) - t[cells[k]];
      acc += weights[k] * e * e;
    }
    out.push_back(std::sqrt(acc / wsum));
  }
  return out;
}

std::vector<DepthRmse> rmse_depth_profile(const FieldSet& pred, const FieldSet& truth,
                                          const OceanGrid& grid, const std::string& variable,
                                          const Region* region) {
  std::vector<int> channels;
  std::vector<double> depths;
  const auto& defs = pred.schema->channels(pred.kind);
  for (int c = 0; c < static_cast<int>(defs.size()); ++c) {
    if (defs[static_cast<std::size_t>(c)].variable != variable) continue;
    if (std::isnan(defs[static_cast<std::size_t>(c)].depth_m)) continue;
    channels.push_back(c);
    depths.push_back(defs[static_cast<std::size_t>(c)].depth_m);
  }
  if (channels.size() < 2)
    throw DataError("rmse_depth_profile: variable has no depth levels: " + variable);

  // shallow -> deep
  std::vector<std::size_t> order(channels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return depths[a] < depths[b];
  });

  std::vector<int> sorted_channels;
  for (auto i : order) sorted_channels.push_back(channels[i]);
  const auto values = rmse(pred, truth, grid, sorted_channels, region);

  std::vector<DepthRmse> out;
  for (std::size_t i = 0; i < order.size(); ++i) out.push_back({depths[order[i]], values[i]});
  return out;
}

SpectrumResult ke_spectrum(const FieldSet& state, int u_channel, int v_channel,
                           const OceanGrid& grid, const Region& region, SpectrumWindow window) {
  // Longitude samples inside the region, as a contiguous arc (may wrap).
  std::vector<int> lon_idx;
  {
    int start = 0;
    while (start < grid.n_lon && region.contains(0.5 * (region.lat_min + region.lat_max),
                                                 grid.lon[start]))
      ++start;  // find a column outside the region so the arc comes out contiguous
    for (int off = 0; off < grid.n_lon; ++off) {
      const int j = (start + off) % grid.n_lon;
      if (region.contains(0.5 * (region.lat_min + region.lat_max), grid.lon[j]))
        lon_idx.push_back(j);
    }
  }
  const int N = static_cast<int>(lon_idx.size());
  if (N < 8) throw DataError("ke_spectrum: region narrower than 8 longitude samples");

  std::vector<int> lat_idx;
  for (int i = 0; i < grid.n_lat; ++i)
    if (grid.lat[i] >= region.lat_min && grid.lat[i] <= region.lat_max) lat_idx.push_back(i);

  std::vector<double> win(static_cast<std::size_t>(N), 1.0);
  if (window == SpectrumWindow::Hann)
    for (int j = 0; j < N; ++j)
      win[static_cast<std::size_t>(j)] = 0.5 * (1.0 - std::cos(2.0 * M_PI * j / N));
  double win_power = 0.0;
  for (double w : win) win_power += w * w;
  win_power /= N;

  const float* up = &state.values[static_cast<std::size_t>(u_channel) * state.plane()];
  const float* vp = &state.values[static_cast<std::size_t>(v_channel) * state.plane()];

  const int kmax = N / 2;
  std::vector<double> ke(static_cast<std::size_t>(kmax) + 1, 0.0);
  int rows_used = 0;
  std::vector<double> us(static_cast<std::size_t>(N)), vs(static_cast<std::size_t>(N));

  for (int i : lat_idx) {
    bool any_land = false;
    for (int j : lon_idx)
      if (!grid.mask[grid.at(i, j)]) {
        any_land = true;
        break;
      }
    if (any_land) continue;  // a gapped row has no well-defined transform

    // rebase each series to its first sample before removing the mean, so a
    // constant offset cancels exactly rather than through a rounded mean
    const double u0 = up[grid.at(i, lon_idx[0])];
    const double v0 = vp[grid.at(i, lon_idx[0])];
    double umean = 0, vmean = 0;
    for (int j = 0; j < N; ++j) {
      us[static_cast<std::size_t>(j)] = up[grid.at(i, lon_idx[static_cast<std::size_t>(j)])] - u0;
      vs[static_cast<std::size_t>(j)] = vp[grid.at(i, lon_idx[static_cast<std::size_t>(j)])] - v0;
      umean += us[static_cast<std::size_t>(j)];
      vmean += vs[static_cast<std::size_t>(j)];
    }
    umean /= N;
    vmean /= N;
    for (int j = 0; j < N; ++j) {
      us[static_cast<std::size_t>(j)] = (us[static_cast<std::size_t>(j)] - umean) * win[static_cast<std::size_t>(j)];
      vs[static_cast<std::size_t>(j)] = (vs[static_cast<std::size_t>(j)] - vmean) * win[static_cast<std::size_t>(j)];
    }

    for (int k = 0; k <= kmax; ++k) {
      double ur = 0, ui = 0, vr = 0, vi = 0;
      for (int j = 0; j < N; ++j) {
        const double ang = -2.0 * M_PI * j * k / N;
        const double cc = std::cos(ang), ss = std::sin(ang);
        ur += us[static_cast<std::size_t>(j)] * cc;
        ui += us[static_cast<std::size_t>(j)] * ss;
        vr += vs[static_cast<std::size_t>(j)] * cc;
        vi += vs[static_cast<std::size_t>(j)] * ss;
      }
      const double scale = 1.0 / (static_cast<double>(N) * N);
      const double one_sided = (k == 0 || (N % 2 == 0 && k == kmax)) ? 1.0 : 2.0;
      ke[static_cast<std::size_t>(k)] +=
          0.5 * one_sided * scale * (ur * ur + ui * ui + vr * vr + vi * vi) / win_power;
    }
    ++rows_used;
  }
  if (rows_used == 0) throw DataError("ke_spectrum: every region row contains land");

  const double dlon = 360.0 / grid.n_lon;
  SpectrumResult out;
  out.region = region.name;
  out.rows_used = rows_used;
  for (int k = 1; k <= kmax; ++k) {
    out.wavenumber.push_back(k / (N * dlon));  // cycles per degree longitude
    out.amplitude.push_back(ke[static_cast<std::size_t>(k)] / rows_used);
  }
  return out;
}

BaselineCurves baselines(const FieldSet& initial, const std::vector<FieldSet>& truth_by_lead,
                         const std::vector<const FieldSet*>& climatology_by_lead,
                         const NormStats& stats, const OceanGrid& grid) {
  if (climatology_by_lead.size() != truth_by_lead.size())
    throw DataError("baselines: lead count mismatch");
  BaselineCurves out;
  for (std::size_t k = 0; k < truth_by_lead.size(); ++k) {
    out.persistence.push_back(std::sqrt(masked_mse(initial, truth_by_lead[k], stats, grid)));
    out.climatology.push_back(
        std::sqrt(masked_mse(*climatology_by_lead[k], truth_by_lead[k], stats, grid)));
  }
  return out;
}

}  // namespace ocean
