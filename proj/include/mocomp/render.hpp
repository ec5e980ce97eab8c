#pragma once

#include "mocomp/fields.hpp"
#include "mocomp/io.hpp"

namespace mocomp {

/// Regular grid lines pushed through x -> x + z(x), drawn in white over a
/// dimmed copy of `background`.
io::Gray8 deformation_grid(const ScalarField& background, const DisplacementField& z, int spacing = 4);

}  // namespace mocomp
