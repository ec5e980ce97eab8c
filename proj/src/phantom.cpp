#include "mocomp/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mocomp/deformation.hpp"

namespace mocomp {

void PhantomSpec::validate() const {
  Grid2D(width, height);
  if (!(amplitude >= 0.0)) throw InvalidParameter("phantom amplitude must be >= 0");
  if (!(noise_sigma >= 0.0)) throw InvalidParameter("phantom noise_sigma must be >= 0");
  if (frames < 1) throw InvalidParameter("phantom frames must be >= 1");
  if (period < 1) throw InvalidParameter("phantom period must be >= 1");
  for (const auto& e : ellipses) {
    if (!(e.ax > 0.0 && e.ay > 0.0)) throw InvalidParameter("ellipse semi-axes must be positive");
  }
}

std::vector<Ellipse> default_ellipses() {
  // Body outline, soft tissue, two lung-like regions, liver-like dome and a
  // few small bright structures for texture.
  return {
      {0.0, 0.0, 0.86, 0.92, 0.0, 1.0},
      {0.0, 0.0, 0.78, 0.84, 0.0, -0.55},
      {-0.36, -0.18, 0.24, 0.42, 12.0, -0.25},
      {0.36, -0.18, 0.24, 0.42, -12.0, -0.25},
      {0.05, 0.45, 0.55, 0.28, 0.0, 0.3},
      {-0.1, 0.05, 0.08, 0.08, 0.0, 0.35},
      {0.18, 0.1, 0.06, 0.12, 30.0, 0.3},
      {-0.42, 0.42, 0.07, 0.05, 0.0, 0.25},
  };
}

ScalarField render_ellipses(const Grid2D& grid, const std::vector<Ellipse>& ellipses) {
  constexpr int kSuper = 4;
  ScalarField f(grid);
  const double sx = 2.0 / (grid.width - 1), sy = 2.0 / (grid.height - 1);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      double acc = 0.0;
      for (int j = 0; j < kSuper; ++j) {
        for (int i = 0; i < kSuper; ++i) {
          const double px = (x + (i + 0.5) / kSuper - 0.5) * sx - 1.0;
          const double py = (y + (j + 0.5) / kSuper - 0.5) * sy - 1.0;
          for (const Ellipse& e : ellipses) {
            const double a = e.angle_deg * std::numbers::pi / 180.0;
            const double dx = px - e.cx, dy = py - e.cy;
            const double u = (dx * std::cos(a) + dy * std::sin(a)) / e.ax;
            const double v = (-dx * std::sin(a) + dy * std::cos(a)) / e.ay;
            if (u * u + v * v <= 1.0) acc += e.intensity;
          }
        }
      }
      f(x, y) = acc / (kSuper * kSuper);
    }
  }
  return f;
}

double breathing_phase(int frame, int period) {
  if ((2 * frame) % period == 0) return 0.0;
  return std::sin(2.0 * std::numbers::pi * frame / period);
}

double border_window(int i, int n) {
  const double margin = 0.1 * (n - 1);
  const double d = std::min(i, n - 1 - i);
  const double t = std::clamp(d / margin, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

DisplacementField motion_field(const PhantomSpec& spec, int frame) {
  const Grid2D grid(spec.width, spec.height);
  DisplacementField z(grid);
  const double s = spec.amplitude * breathing_phase(frame, spec.period);
  if (s == 0.0) return z;
  for (int y = 0; y < grid.height; ++y) {
    // The compression profile already vanishes on the top and bottom rows,
    // so it only needs the horizontal taper.
    const double profile = spec.mode == MotionMode::kTranslation
                               ? border_window(y, grid.height)
                               : std::sin(2.0 * std::numbers::pi * y / (grid.height - 1));
    for (int x = 0; x < grid.width; ++x) {
      z(x, y) = {0.0, s * profile * border_window(x, grid.width)};
    }
  }
  return z;
}

PhantomData generate(const PhantomSpec& spec) {
  spec.validate();
  const Grid2D grid(spec.width, spec.height);
  PhantomData out;
  out.truth = render_ellipses(grid, spec.ellipses.empty() ? default_ellipses() : spec.ellipses);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::vector<ComplexField> xs;
  for (int i = 0; i < spec.frames; ++i) {
    DisplacementField z = motion_field(spec, i);
    const double md = min_value(jacobian_determinant(z));
    if (!(md > spec.min_det)) {
      std::ostringstream os;
      os << "phantom frame " << i << " folds: min det " << md << " <= " << spec.min_det;
      throw InvariantViolation(os.str());
    }
    ComplexField x = forward(warp(out.truth, z));
    if (spec.noise_sigma > 0.0) {
      for (auto& c : x.values()) {
        const double re = noise(rng);
        const double im = noise(rng);
        c += std::complex<double>(re, im);
      }
    }
    out.z_true.push_back(std::move(z));
    xs.push_back(std::move(x));
  }
  out.acquisitions = KSpaceStack(std::move(xs));
  return out;
}

}  // namespace mocomp
