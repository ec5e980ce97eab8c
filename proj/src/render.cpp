#include "mocomp/render.hpp"

#include <algorithm>
#include <cmath>

namespace mocomp {

io::Gray8 deformation_grid(const ScalarField& background, const DisplacementField& z, int spacing) {
  require_same_grid(background.grid(), z.grid(), "deformation_grid");
  if (spacing < 1) throw InvalidParameter("deformation_grid: spacing must be >= 1");
  const int w = z.width(), h = z.height();
  io::Gray8 img{w, h, std::vector<unsigned char>(z.size())};

  const double lo = min_value(background), hi = max_value(background);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double t = hi > lo ? (background[i] - lo) / (hi - lo) : 0.0;
    img.pixels[i] = static_cast<unsigned char>(std::lround(150.0 * t));
  }

  auto plot = [&](double x, double y) {
    const Vec2 d = sample_bilinear(z, x, y);
    const long px = std::lround(x + d.x), py = std::lround(y + d.y);
    if (px >= 0 && px < w && py >= 0 && py < h) img.pixels[static_cast<std::size_t>(py) * w + px] = 255;
  };
  constexpr double kStep = 0.25;
  for (int gx = 0; gx < w; gx += spacing)
    for (double y = 0.0; y <= h - 1; y += kStep) plot(gx, y);
  for (int gy = 0; gy < h; gy += spacing)
    for (double x = 0.0; x <= w - 1; x += kStep) plot(x, gy);
  return img;
}

}  // namespace mocomp
