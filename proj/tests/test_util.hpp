#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mocomp/fields.hpp"

namespace testutil {

inline mocomp::ScalarField random_scalar(const mocomp::Grid2D& g, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  mocomp::ScalarField f(g);
  for (double& v : f.values()) v = d(rng);
  return f;
}

inline mocomp::VectorField random_vector(const mocomp::Grid2D& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  mocomp::VectorField f(g);
  for (auto& v : f.values()) v = {d(rng), d(rng)};
  return f;
}

// Smooth field vanishing on the border: amplitude * sin(pi x/(w-1)) sin(pi y/(h-1)) in both components,
// with a phase offset between them.
inline mocomp::DisplacementField smooth_field(const mocomp::Grid2D& g, double amplitude, double freq = 1.0) {
  mocomp::DisplacementField z(g);
  const double pi = 3.14159265358979323846;
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const double sx = std::sin(pi * x / (g.width - 1)), sy = std::sin(pi * y / (g.height - 1));
      const double b = sx * sy;
      z(x, y) = {amplitude * b * std::cos(freq * pi * y / (g.height - 1)),
                 amplitude * b * std::sin(freq * pi * x / (g.width - 1) + 0.3)};
    }
  return z;
}

inline mocomp::ScalarField smooth_image(const mocomp::Grid2D& g) {
  mocomp::ScalarField f(g);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const double dx = x - 0.5 * g.width, dy = y - 0.45 * g.height;
      f(x, y) = std::exp(-(dx * dx + 0.6 * dy * dy) / (0.05 * g.width * g.height)) + 0.2 * std::sin(0.2 * x);
    }
  return f;
}

// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) throw std::runtime_error("singular system");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace testutil
