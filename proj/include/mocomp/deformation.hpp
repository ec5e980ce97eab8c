#pragma once

// Deformation machinery for phi = Id + z: Jacobian determinants, the
// semi-implicit gradient flow in z, composition, inversion and regridding.
// Displacements vanish on the grid border (phi = Id on the boundary).

#include <vector>

#include "mocomp/fields.hpp"

namespace mocomp {

/// det(I + grad z) per pixel, forward-difference stencil.
ScalarField jacobian_determinant(const DisplacementField& z);

/// (outer o inner): z_c(x) = z_inner(x) + z_outer(x + z_inner(x)).
DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner);

/// Force z to zero on the outermost ring of pixels.
void clamp_boundary(DisplacementField& z);

struct FlowParams {
  double gamma1 = 5.0;
  double gamma2 = 1e5;
  double dt = 1e-3;
  /// Per-pixel bound on the image-force displacement of one step, in
  /// pixels. Non-positive disables the cap.
  double max_force_step = 0.25;
};

/// One semi-implicit Euler step of the L2 gradient flow of
///   gamma1/2 |v - grad z|^2 + gamma2/2 |w o phi - u|^2
/// with respect to z. The Laplacian is implicit and solved exactly with a
/// sine transform on the interior (Dirichlet border):
///   (I - dt gamma1 Lap) z' = z - dt gamma1 div v + s
/// The image force s is the data term linearized around phi and taken
/// implicitly per pixel, r = w o phi - u, q = grad w(phi):
///   s = -dt gamma2 r q / (1 + dt gamma2 |q|^2)
/// which keeps the step bounded when gamma2 |q|^2 is large; |s| is further
/// clamped to max_force_step.
/// Throws SolverError if the solve misses a 1e-8 relative residual.
DisplacementField update_phi(const DisplacementField& z, const TensorField& v, const ScalarField& w,
                             const ScalarField& u, const FlowParams& params);

struct PhiStep {
  DisplacementField z;
  /// Relative residual of the implicit solve.
  double residual = 0.0;
  /// Largest explicit displacement increment before the solve, in pixels.
  double max_increment = 0.0;
};
PhiStep update_phi_step(const DisplacementField& z, const TensorField& v, const ScalarField& w,
                        const ScalarField& u, const FlowParams& params);

/// Solve (I - alpha Lap) x = b on the interior with x = 0 on the border.
DisplacementField solve_screened_poisson(const DisplacementField& b, double alpha);

struct InverseResult {
  DisplacementField z_inv;
  /// max_x |phi(phi^-1(x)) - x|
  double residual = 0.0;
  int iterations = 0;
};

/// Fixed-point inversion z_inv <- -z(x + z_inv(x)), started from -z.
/// Throws InversionFailed when the update grows 10 times in a row.
InverseResult invert(const DisplacementField& z, double tol = 1e-3, int max_iter = 50);

/// Regridding history for one deformation. The effective map is
/// saved[0] o saved[1] o ... o (Id + z).
struct DeformationState {
  DisplacementField z;
  std::vector<DisplacementField> saved;
  int regrid_count = 0;

  DeformationState() = default;
  explicit DeformationState(const Grid2D& grid) : z(grid) {}

  DisplacementField total() const;
};

struct RegridResult {
  DeformationState state;
  TensorField v;
  ScalarField w;
  bool regridded = false;
};

/// Save z into the history, reset z and v to zero and replace w by
/// w o (Id + z), so w o phi_saved o phi_new keeps registering the same image.
RegridResult regrid(DeformationState state, TensorField v, ScalarField w);

/// If min det(I + grad z) < det_floor: save z, reset z and v to zero and
/// replace w by w o phi_saved.
RegridResult regrid_if_needed(DeformationState state, TensorField v, ScalarField w, double det_floor);

}  // namespace mocomp
