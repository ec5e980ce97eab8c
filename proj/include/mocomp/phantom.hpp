#pragma once

// Synthetic ground truth: an ellipse phantom, breathing-like deformations and
// noisy fully-sampled k-space frames x_i = A(truth o phi_i) + noise.

#include <cstdint>
#include <vector>

#include "mocomp/fields.hpp"
#include "mocomp/fourier.hpp"

namespace mocomp {

struct Ellipse {
  double cx = 0.0, cy = 0.0;  ///< centre, normalized to [-1, 1]
  double ax = 0.5, ay = 0.5;  ///< semi-axes, normalized
  double angle_deg = 0.0;
  double intensity = 1.0;     ///< added inside the ellipse
};

enum class MotionMode { kTranslation, kCompression };

struct PhantomSpec {
  int width = 64;
  int height = 64;
  std::vector<Ellipse> ellipses;  ///< empty selects default_ellipses()
  double amplitude = 2.0;         ///< peak displacement, pixels
  int period = 6;                 ///< frames per breathing cycle
  MotionMode mode = MotionMode::kCompression;
  double noise_sigma = 0.02;      ///< per real/imag component of k-space
  int frames = 6;
  std::uint64_t seed = 1;
  /// Generated deformations must keep det(I + grad z) above this.
  double min_det = 0.2;

  void validate() const;
};

/// Head-like ellipse set with peak intensity 1.
std::vector<Ellipse> default_ellipses();

struct PhantomData {
  ScalarField truth;
  std::vector<DisplacementField> z_true;
  KSpaceStack acquisitions;
};

ScalarField render_ellipses(const Grid2D& grid, const std::vector<Ellipse>& ellipses);

/// Breathing phase sin(2 pi i / period), exactly zero at its zeros.
double breathing_phase(int frame, int period);

/// Smoothstep taper over a 10%-wide border margin; 0 on the border.
double border_window(int i, int n);

DisplacementField motion_field(const PhantomSpec& spec, int frame);

/// Throws InvariantViolation when a frame's deformation folds below min_det.
PhantomData generate(const PhantomSpec& spec);

}  // namespace mocomp
