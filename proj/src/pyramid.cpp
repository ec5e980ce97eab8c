#include "mocomp/pyramid.hpp"

#include <algorithm>
#include <cmath>

namespace mocomp {

ScalarField downsample_box(const ScalarField& f, int factor) {
  if (factor < 1) throw InvalidParameter("downsample factor must be >= 1");
  if (factor == 1) return f;
  const Grid2D g(f.width() / factor, f.height() / factor);
  ScalarField out(g);
  const double norm = 1.0 / (factor * factor);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      double s = 0.0;
      for (int j = 0; j < factor; ++j)
        for (int i = 0; i < factor; ++i) s += f(x * factor + i, y * factor + j);
      out(x, y) = s * norm;
    }
  }
  return out;
}

namespace {

template <typename T>
T sample_clamped(const Field<T>& f, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
  const int x0 = std::min(static_cast<int>(x), f.width() - 2);
  const int y0 = std::min(static_cast<int>(y), f.height() - 2);
  const double fx = x - x0, fy = y - y0;
  const T top = (1.0 - fx) * f(x0, y0) + fx * f(x0 + 1, y0);
  const T bot = (1.0 - fx) * f(x0, y0 + 1) + fx * f(x0 + 1, y0 + 1);
  return (1.0 - fy) * top + fy * bot;
}

template <typename T>
Field<T> resample(const Field<T>& f, const Grid2D& target) {
  const double rx = static_cast<double>(f.width()) / target.width;
  const double ry = static_cast<double>(f.height()) / target.height;
  Field<T> out(target);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < target.height; ++y) {
    for (int x = 0; x < target.width; ++x) {
      out(x, y) = sample_clamped(f, (x + 0.5) * rx - 0.5, (y + 0.5) * ry - 0.5);
    }
  }
  return out;
}

}  // namespace

ScalarField upsample_bilinear(const ScalarField& f, const Grid2D& target) { return resample(f, target); }

DisplacementField upsample_displacement(const DisplacementField& z, const Grid2D& target) {
  DisplacementField out = resample(z, target);
  const double sx = static_cast<double>(target.width) / z.width();
  const double sy = static_cast<double>(target.height) / z.height();
  for (Vec2& d : out.values()) d = {d.x * sx, d.y * sy};
  for (int x = 0; x < target.width; ++x) out(x, 0) = out(x, target.height - 1) = Vec2{};
  for (int y = 0; y < target.height; ++y) out(0, y) = out(target.width - 1, y) = Vec2{};
  return out;
}

Grid2D level_grid(const Grid2D& fine, int levels, int level) {
  const int factor = 1 << (levels - 1 - level);
  return Grid2D(fine.width / factor, fine.height / factor);
}

int usable_levels(const Grid2D& fine, int requested) {
  int levels = std::max(1, requested);
  while (levels > 1) {
    const int factor = 1 << (levels - 1);
    if (fine.width / factor >= 4 && fine.height / factor >= 4) break;
    --levels;
  }
  return levels;
}

}  // namespace mocomp
