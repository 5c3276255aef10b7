#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oceancast/evaluation.hpp"
#include "oceancast/training.hpp"
#include "test_util.hpp"

using namespace ocean;

namespace {

FieldSet random_state(const SchemaPtr& schema, const OceanGrid& grid, std::uint64_t seed,
                      std::int64_t day = 0) {
  FieldSet f = make_fieldset(schema, FieldKind::State, grid, day);
  test_util::fill_random(f, grid, seed);
  return f;
}

}  // namespace

TEST_CASE("builtin region tables match the reference boxes") {
  const auto& rmse_regions = builtin_rmse_regions();
  REQUIRE(rmse_regions.size() == 4);

  CHECK(rmse_regions[0].name == "gulf_stream");
  CHECK(rmse_regions[0].extent == "76W-40W, 35N-45N");
  CHECK(rmse_regions[0].lon_min == 360.0 - 76.0);
  CHECK(rmse_regions[0].lon_max == 360.0 - 40.0);
  CHECK(rmse_regions[0].lat_min == 35.0);
  CHECK(rmse_regions[0].lat_max == 45.0);

  CHECK(rmse_regions[1].name == "kuroshio_extension");
  CHECK(rmse_regions[1].extent == "120E-179E, 20N-55N");
  CHECK(rmse_regions[1].lon_min == 120.0);
  CHECK(rmse_regions[1].lon_max == 179.0);
  CHECK(rmse_regions[1].lat_min == 20.0);
  CHECK(rmse_regions[1].lat_max == 55.0);

  CHECK(rmse_regions[2].name == "south_china_sea");
  CHECK(rmse_regions[2].extent == "100E-122E, 0N-27N");
  CHECK(rmse_regions[2].lon_min == 100.0);
  CHECK(rmse_regions[2].lon_max == 122.0);
  CHECK(rmse_regions[2].lat_min == 0.0);
  CHECK(rmse_regions[2].lat_max == 27.0);

  CHECK(rmse_regions[3].name == "yellow_sea");
  CHECK(rmse_regions[3].extent == "118E-127E, 30N-42N");
  CHECK(rmse_regions[3].lon_min == 118.0);
  CHECK(rmse_regions[3].lon_max == 127.0);
  CHECK(rmse_regions[3].lat_min == 30.0);
  CHECK(rmse_regions[3].lat_max == 42.0);

  const auto& spectral = builtin_spectral_regions();
  REQUIRE(spectral.size() == 2);
  CHECK(spectral[0].name == "north_pacific");
  CHECK(spectral[0].extent == "10N-40N, 145E-175E");
  CHECK(spectral[0].lon_min == 145.0);
  CHECK(spectral[0].lon_max == 175.0);
  CHECK(spectral[0].lat_min == 10.0);
  CHECK(spectral[0].lat_max == 40.0);
  CHECK(spectral[1].name == "north_atlantic");
  CHECK(spectral[1].extent == "10N-40N, 60W-30W");
  CHECK(spectral[1].lon_min == 360.0 - 60.0);
  CHECK(spectral[1].lon_max == 360.0 - 30.0);
  CHECK(spectral[1].lat_min == 10.0);
  CHECK(spectral[1].lat_max == 40.0);

  CHECK(find_region("gulf_stream").name == "gulf_stream");
  CHECK_THROWS_AS(find_region("atlantis"), ConfigError);
}

TEST_CASE("rmse: identity, constant offset, loop oracle") {
  const OceanGrid grid = test_util::hemispheric_grid(10, 16);
  auto schema = toy_schema(1);
  const FieldSet truth = random_state(schema, grid, 60);

  const std::vector<int> all = {0, 1, 2, 3, 4};
  for (double v : rmse(truth, truth, grid, all)) CHECK(v == 0.0);

  FieldSet offset = truth;
  for (int c = 0; c < offset.channels(); ++c)
    for (auto cell : grid.ocean_cells()) offset.values[c * offset.plane() + cell] += 0.5f;
  for (double v : rmse(offset, truth, grid, all)) CHECK(v == doctest::Approx(0.5).epsilon(1e-7));

  const FieldSet pred = random_state(schema, grid, 61);
  const Region box{"box", 200.0, 300.0, -40.0, 30.0, ""};
  const auto got = rmse(pred, truth, grid, {2}, &box);
  double acc = 0.0;
  int n = 0;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      if (!grid.mask[grid.at(i, j)] || !box.contains(grid.lat[i], grid.lon[j])) continue;
      const double e = static_cast<double>(pred.at(2, i, j)) - truth.at(2, i, j);
      acc += e * e;
      ++n;
    }
  REQUIRE(n > 0);
  CHECK(got[0] == doctest::Approx(std::sqrt(acc / n)).epsilon(1e-10));

  // land-only region errors
  const Region land{"land", 0.0, 170.0, -80.0, 80.0, ""};  // hemispheric land mask
  CHECK_THROWS_AS(rmse(pred, truth, grid, {0}, &land), DataError);
}

TEST_CASE("rmse handles wrapped longitude intervals") {
  const OceanGrid grid = test_util::hemispheric_grid(10, 16);
  const Region wrapped{"w", 350.0, 10.0, -45.0, 45.0, ""};
  int inside = 0;
  for (int j = 0; j < grid.n_lon; ++j)
    if (wrapped.contains(0.0, grid.lon[j])) ++inside;
  CHECK(inside == 1);  // only lon=0 of the 22.5-degree grid falls in [350, 10]
  CHECK(wrapped.contains(0.0, 355.0));
  CHECK(wrapped.contains(0.0, 5.0));
  CHECK(!wrapped.contains(0.0, 180.0));
}

TEST_CASE("cos-latitude weighting reweights the mean") {
  const OceanGrid grid = test_util::hemispheric_grid(10, 16);
  auto schema = toy_schema(1);
  const FieldSet truth = random_state(schema, grid, 62);
  FieldSet pred = truth;
  // error only in the northernmost row: cos-lat weighting must shrink RMSE
  const int i = grid.n_lat - 1;
  for (int j = 0; j < grid.n_lon; ++j)
    if (grid.mask[grid.at(i, j)]) pred.at(0, i, j) += 1.0f;
  const double plain = rmse(pred, truth, grid, {0})[0];
  const double weighted = rmse(pred, truth, grid, {0}, nullptr, true)[0];
  CHECK(weighted < plain);
}

TEST_CASE("depth profile: per-level isolation and composition") {
  const OceanGrid grid = test_util::hemispheric_grid(8, 12);
  auto schema = toy_schema(6);
  const FieldSet truth = random_state(schema, grid, 63);

  auto zeros = rmse_depth_profile(truth, truth, grid, "uo");
  REQUIRE(zeros.size() == 6);
  for (const auto& [depth, v] : zeros) CHECK(v == 0.0);
  for (std::size_t k = 1; k < zeros.size(); ++k) CHECK(zeros[k].depth_m > zeros[k - 1].depth_m);

  // error injected only at level index 3
  FieldSet pred = truth;
  const auto& defs = schema->state;
  int target_channel = -1;
  for (int c = 0; c < static_cast<int>(defs.size()); ++c)
    if (defs[static_cast<std::size_t>(c)].variable == "uo" &&
        defs[static_cast<std::size_t>(c)].depth_m == standard_depth_levels()[3])
      target_channel = c;
  REQUIRE(target_channel >= 0);
  for (auto cell : grid.ocean_cells())
    pred.values[static_cast<std::size_t>(target_channel) * pred.plane() + cell] += 2.0f;

  const auto profile = rmse_depth_profile(pred, truth, grid, "uo");
  for (const auto& [depth, v] : profile) {
    if (depth == standard_depth_levels()[3])
      CHECK(v == doctest::Approx(2.0).epsilon(1e-6));
    else
      CHECK(v == 0.0);
  }

  // compositional: per-level values equal rmse on that channel
  const auto direct = rmse(pred, truth, grid, {target_channel});
  CHECK(profile[3].value == direct[0]);

  // surface-only variable has no profile
  CHECK_THROWS_AS(rmse_depth_profile(pred, truth, grid, "zos"), DataError);
}

TEST_CASE("ke_spectrum: injected mode, Parseval, constant invariance") {
  OceanGrid grid = make_uniform_grid(12, 36);  // aquaplanet
  auto schema = toy_schema(1);
  const Region all{"belt", 0.0, 359.99, -90.0, 90.0, ""};
  const int N = grid.n_lon;
  const int u_ch = 1, v_ch = 2;  // uo@0.49, vo@0.49

  // single-mode field: u = A cos(2*pi*3*j/N), v = 0
  FieldSet f = make_fieldset(schema, FieldKind::State, grid, 0);
  const double A = 1.5;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      for (int c = 0; c < f.channels(); ++c) f.at(c, i, j) = 0.0f;
      f.at(u_ch, i, j) = static_cast<float>(A * std::cos(2.0 * M_PI * 3.0 * j / N));
    }

  const auto spec = ke_spectrum(f, u_ch, v_ch, grid, all, SpectrumWindow::None);
  REQUIRE(spec.wavenumber.size() == static_cast<std::size_t>(N / 2));
  CHECK(spec.rows_used == grid.n_lat);
  for (std::size_t k = 0; k < spec.amplitude.size(); ++k) {
    if (k + 1 == 3)
      CHECK(std::abs(spec.amplitude[k] - A * A / 4.0) < 1e-6);
    else
      CHECK(std::abs(spec.amplitude[k]) < 1e-9);
  }
  // wavenumber axis in cycles per degree of longitude
  const double dlon = 360.0 / N;
  CHECK(spec.wavenumber[2] == doctest::Approx(3.0 / (N * dlon)).epsilon(1e-12));

  // zero fields give a zero spectrum
  FieldSet z = make_fieldset(schema, FieldKind::State, grid, 0);
  for (auto& v : z.values) v = 0.0f;
  for (double a : ke_spectrum(z, u_ch, v_ch, grid, all, SpectrumWindow::None).amplitude)
    CHECK(a == 0.0);

  // Parseval: sum of KE bins equals the spatial mean of (u^2+v^2)/2 after
  // detrending, exactly (no window)
  FieldSet r = make_fieldset(schema, FieldKind::State, grid, 0);
  test_util::fill_random(r, grid, 64);
  const auto rs = ke_spectrum(r, u_ch, v_ch, grid, all, SpectrumWindow::None);
  double total = 0.0;
  for (double a : rs.amplitude) total += a;
  double mean_ke = 0.0;
  for (int i = 0; i < grid.n_lat; ++i) {
    double umean = 0, vmean = 0;
    for (int j = 0; j < N; ++j) {
      umean += r.at(u_ch, i, j);
      vmean += r.at(v_ch, i, j);
    }
    umean /= N;
    vmean /= N;
    double row = 0.0;
    for (int j = 0; j < N; ++j) {
      const double du = r.at(u_ch, i, j) - umean;
      const double dv = r.at(v_ch, i, j) - vmean;
      row += 0.5 * (du * du + dv * dv);
    }
    mean_ke += row / N;
  }
  mean_ke /= grid.n_lat;
  CHECK(total == doctest::Approx(mean_ke).epsilon(1e-6));

  // constant offsets vanish under detrending (values chosen exactly
  // representable so the offset is exact in float)
  FieldSet base = make_fieldset(schema, FieldKind::State, grid, 0);
  std::mt19937_64 rng(65);
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      base.at(u_ch, i, j) = static_cast<float>(static_cast<int>(rng() % 2048) - 1024) / 1024.0f;
      base.at(v_ch, i, j) = static_cast<float>(static_cast<int>(rng() % 2048) - 1024) / 1024.0f;
      base.at(0, i, j) = 0.0f;
      base.at(3, i, j) = 0.0f;
      base.at(4, i, j) = 0.0f;
    }
  FieldSet shifted = base;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      shifted.at(u_ch, i, j) += 4.0f;
      shifted.at(v_ch, i, j) -= 8.0f;
    }
  const auto s0 = ke_spectrum(base, u_ch, v_ch, grid, all, SpectrumWindow::None);
  const auto s1 = ke_spectrum(shifted, u_ch, v_ch, grid, all, SpectrumWindow::None);
  CHECK(s0.amplitude == s1.amplitude);

  // Hann window preserves the peak location
  const auto hann = ke_spectrum(f, u_ch, v_ch, grid, all, SpectrumWindow::Hann);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < hann.amplitude.size(); ++k)
    if (hann.amplitude[k] > hann.amplitude[argmax]) argmax = k;
  CHECK(argmax + 1 == 3);
}

TEST_CASE("ke_spectrum region handling: land rows dropped, narrow regions rejected") {
  OceanGrid grid = make_uniform_grid(12, 36);
  // land strip in one latitude row inside the belt
  for (int j = 0; j < grid.n_lon; ++j) {
    grid.mask[grid.at(5, j)] = false;
    grid.depth[grid.at(5, j)] = 0.0;
  }
  auto schema = toy_schema(1);
  FieldSet f = make_fieldset(schema, FieldKind::State, grid, 0);
  test_util::fill_random(f, grid, 66);
  const Region belt{"belt", 0.0, 359.99, -90.0, 90.0, ""};
  const auto s = ke_spectrum(f, 1, 2, grid, belt, SpectrumWindow::None);
  CHECK(s.rows_used == grid.n_lat - 1);

  const Region narrow{"narrow", 0.0, 40.0, -90.0, 90.0, ""};  // 5 samples at 10 deg
  CHECK_THROWS_AS(ke_spectrum(f, 1, 2, grid, narrow, SpectrumWindow::None), DataError);

  OceanGrid dead = grid;
  for (std::size_t c = 0; c < dead.cells(); ++c) dead.mask[c] = false;
  // every row has land -> no usable rows
  CHECK_THROWS_AS(ke_spectrum(f, 1, 2, dead, belt, SpectrumWindow::None), DataError);
}

TEST_CASE("baselines: persistence and climatology curves") {
  const OceanGrid grid = test_util::hemispheric_grid(8, 12);
  auto schema = toy_schema(1);
  FieldSet statics = make_statics(schema, grid);
  std::vector<FieldSet> xs, as;
  for (int t = 0; t < 4; ++t) {
    xs.push_back(random_state(schema, grid, 70 + t, t));
    FieldSet a = make_fieldset(schema, FieldKind::Forcing, grid, t);
    test_util::fill_random(a, grid, 80 + t);
    as.push_back(std::move(a));
  }
  std::vector<DaySample> days;
  for (int t = 0; t < 4; ++t) days.push_back({&xs[static_cast<std::size_t>(t)], &as[static_cast<std::size_t>(t)]});
  const NormStats stats = compute_norm_stats(days, statics, grid);

  // constant truth: persistence rmse is zero at every lead
  std::vector<FieldSet> const_truth = {xs[0], xs[0], xs[0]};
  std::vector<const FieldSet*> clim = {&xs[1], &xs[1], &xs[1]};
  const auto curves = baselines(xs[0], const_truth, clim, stats, grid);
  for (double v : curves.persistence) CHECK(v == 0.0);
  for (double v : curves.climatology) CHECK(v > 0.0);

  // lead-0 convention: persistence against the initial state itself is zero
  CHECK(masked_mse(xs[0], xs[0], stats, grid) == 0.0);

  // varying truth: persistence rmse equals sqrt(masked_mse)
  std::vector<FieldSet> truth = {xs[1], xs[2], xs[3]};
  std::vector<const FieldSet*> clim2 = {&xs[0], &xs[0], &xs[0]};
  const auto c2 = baselines(xs[0], truth, clim2, stats, grid);
  CHECK(c2.persistence[1] == doctest::Approx(std::sqrt(masked_mse(xs[0], xs[2], stats, grid))));
}
