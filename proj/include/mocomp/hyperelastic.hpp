#pragma once

// Ogden-type stored energy
//
//   W(F) = a1 |F|^4 + a2 (det F - 1/det F)^4   if det F > 0, +inf otherwise
//
// and the semi-implicit update of the auxiliary field v. v stores the
// displacement gradient, so the deformation gradient is F = I + v.

#include "mocomp/fields.hpp"

namespace mocomp {

struct OgdenParams {
  double a1 = 1.0;   ///< length-change weight
  double a2 = 50.0;  ///< area-change weight

  void validate() const;
};

double w_op(const Mat2& F, const OgdenParams& p) noexcept;

/// d/d(delta) of (delta - 1/delta)^4, i.e. 4 c0 c1.
double gamma_prime(double delta);

/// Analytic dW/dF; requires det F > 0.
Mat2 w_op_gradient(const Mat2& F, const OgdenParams& p) noexcept;

/// One semi-implicit step for every pixel:
///
///   v <- (v + dt (-dW/dF(I + v) + gamma1 grad z)) / (1 + dt gamma1)
///
/// Throws StepDiverged when a result is non-finite or det(I + v) <= 0.
TensorField update_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma1,
                     double dt);

/// The same step with the time step chosen per pixel: each pixel takes the
/// largest dt / 2^m (m <= max_halvings) that keeps det(I + v) > 0 and does
/// not increase its share W(I + v) + gamma1/2 |v - grad z|^2 of the energy,
/// and stays put if none does. The v problem decouples over pixels, so this
/// is a plain descent method on it; it never throws.
TensorField descend_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma1,
                      double dt, int max_halvings = 40);

/// Sum over pixels of W(I + v).
double hyperelastic_energy(const TensorField& v, const OgdenParams& p);

}  // namespace mocomp
