#pragma once

#include "mocomp/fields.hpp"

namespace mocomp {

/// Average over factor x factor blocks; a trailing partial block is dropped.
ScalarField downsample_box(const ScalarField& f, int factor);

/// Bilinear resampling onto `target`, pixel centres aligned, edge values
/// replicated.
ScalarField upsample_bilinear(const ScalarField& f, const Grid2D& target);

/// Resample a displacement onto `target`, rescaling the vectors by the grid
/// size ratio, and zero it on the border.
DisplacementField upsample_displacement(const DisplacementField& z, const Grid2D& target);

/// Grid of pyramid level `level` (0 = coarsest) for `levels` levels.
Grid2D level_grid(const Grid2D& fine, int levels, int level);

/// Number of usable levels: every level keeps at least 4x4 pixels.
int usable_levels(const Grid2D& fine, int requested);

}  // namespace mocomp
