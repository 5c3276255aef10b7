#include "oceancast/regrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ocean {

namespace {

std::array<double, 4> kernel_weights(BicubicKernel kernel, double t) {
  if (kernel == BicubicKernel::CatmullRom) {
    const double t2 = t * t, t3 = t2 * t;
    return {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0,
            -1.5 * t3 + 2.0 * t2 + 0.5 * t, 0.5 * t3 - 0.5 * t2};
  }
  // Lagrange basis through offsets {-1, 0, 1, 2}
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -t * (t + 1.0) * (t - 2.0) / 2.0, t * (t + 1.0) * (t - 1.0) / 6.0};
}

}  // namespace

std::vector<double> regrid_bicubic(const OceanGrid& src_grid, const std::vector<double>& src,
                                  const OceanGrid& dst_grid, BicubicKernel kernel) {
  if (src.size() != src_grid.cells()) throw DataError("regrid_bicubic: source size mismatch");
  const int sn_lat = src_grid.n_lat, sn_lon = src_grid.n_lon;
  const double lat0 = src_grid.lat.front(), lat1 = src_grid.lat.back();
  const double dlat = (lat1 - lat0) / (sn_lat - 1);
  const double lon0 = src_grid.lon.front();
  const double dlon = 360.0 / sn_lon;

  std::vector<double> out(dst_grid.cells());
  constexpr double kEps = 1e-9;
  for (int di = 0; di < dst_grid.n_lat; ++di) {
    const double lat = dst_grid.lat[di];
    if (lat < lat0 - kEps || lat > lat1 + kEps)
      throw DataError("regrid_bicubic: destination latitude outside source span");
    const double fi = std::clamp((lat - lat0) / dlat, 0.0, static_cast<double>(sn_lat - 1));
    int i0 = static_cast<int>(std::floor(fi));
    i0 = std::min(i0, sn_lat - 2);
    const double ti = fi - i0;
    const auto wi = kernel_weights(kernel, ti);

    for (int dj = 0; dj < dst_grid.n_lon; ++dj) {
      double flon = (dst_grid.lon[dj] - lon0) / dlon;
      flon -= std::floor(flon / sn_lon) * sn_lon;  // wrap into [0, sn_lon)
      int j0 = static_cast<int>(std::floor(flon));
      const double tj = flon - j0;
      const auto wj = kernel_weights(kernel, tj);

      double acc = 0.0;
      for (int a = -1; a <= 2; ++a) {
        const int si = std::clamp(i0 + a, 0, sn_lat - 1);  // edge-clamped stencil
        double row = 0.0;
        for (int b = -1; b <= 2; ++b) {
          const int sj = (j0 + b + sn_lon) % sn_lon;  // periodic
          row += wj[b + 1] * src[src_grid.at(si, sj)];
        }
        acc += wi[a + 1] * row;
      }
      out[dst_grid.at(di, dj)] = acc;
    }
  }
  return out;
}

}  // namespace ocean
