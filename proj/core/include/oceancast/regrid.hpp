#pragma once

#include <vector>

#include "oceancast/fields.hpp"

namespace ocean {

// Separable 4x4 bicubic kernel. Lagrange interpolates through the stencil and
// is exact on polynomials up to degree 3 per coordinate; Catmull-Rom is the
// C1 spline variant (exact through degree 2).
enum class BicubicKernel { Lagrange, CatmullRom };

// Interpolate a single plane (defined everywhere on src_grid, e.g. a forcing
// channel) onto dst_grid. Periodic in longitude, stencil rows clamped at the
// latitude boundary; destination latitudes outside the source latitude span
// are an error.
std::vector<double> regrid_bicubic(const OceanGrid& src_grid, const std::vector<double>& src,
                                  const OceanGrid& dst_grid,
                                  BicubicKernel kernel = BicubicKernel::Lagrange);

}  // namespace ocean
