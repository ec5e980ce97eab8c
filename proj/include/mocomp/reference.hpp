#pragma once

// Plain serial versions of the per-pixel kernels. They are written for
// clarity rather than speed, carry no OpenMP, and exist so tests and the
// benchmark can compare them against the parallel kernels in the library.

#include "mocomp/fields.hpp"
#include "mocomp/hyperelastic.hpp"

namespace mocomp::reference {

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& p);
ScalarField warp(const ScalarField& f, const DisplacementField& z);
ScalarField gaussian_blur(const ScalarField& f, double sigma);
ScalarField jacobian_determinant(const DisplacementField& z);
TensorField update_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma1,
                     double dt);

/// Weighted Chambolle projection, same iteration as mocomp::prox_wtv.
ScalarField prox_wtv(const ScalarField& w, const ScalarField& g, double theta, int n_iter, double delta_t);

/// Classic unweighted Chambolle projection for min 1/(2 theta)|f - w|^2 + TV(f).
ScalarField chambolle_tv(const ScalarField& w, double theta, int n_iter, double tau);

}  // namespace mocomp::reference
