#pragma once

#include "oceancast/dense.hpp"
#include "oceancast/stats.hpp"

namespace ocean {

// Per-ocean-cell rows of one fieldset in physical units, [N_ocean x C],
// cells enumerated in the grid's fixed row-major order.
Matrix<float> extract_rows(const FieldSet& f, const std::vector<std::uint32_t>& ocean_cells);

// Normalized model input rows [N_ocean x C_in] built by concatenating
// X^{t-1}, X^t, A^{t-1}, A^t, A^{t+1}, S. C_in = 2*C_X + 3*C_A + C_S.
// Time stamps must be consecutive; land cells are never read for state
// channels. Any incidental non-finite value is replaced by 0 after
// normalization.
Matrix<float> assemble_grid_input(const FieldSet& x_prev, const FieldSet& x_cur,
                                  const FieldSet& a_prev, const FieldSet& a_cur,
                                  const FieldSet& a_next, const FieldSet& statics,
                                  const NormStats& stats, const OceanGrid& grid);

}  // namespace ocean
