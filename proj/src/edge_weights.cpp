#include "mocomp/edge_weights.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mocomp/fourier.hpp"

namespace mocomp {

WeightMap unit_weights(const Grid2D& grid) { return WeightMap{ScalarField(grid, 1.0), 0.01, 0.0}; }

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidParameter("percentile of an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return v[lo] + t * (v[hi] - v[lo]);
}

WeightMap weight_map_from_image(const ScalarField& image, double sigma, std::optional<double> lambda,
                                double floor) {
  if (!(sigma > 0.0)) throw InvalidParameter("weight_map: sigma must be positive");
  if (lambda && !(*lambda > 0.0)) throw InvalidParameter("weight_map: lambda must be positive");
  if (!(floor > 0.0 && floor < 1.0)) throw InvalidParameter("weight_map: floor must lie in (0, 1)");

  const VectorField grad = gradient(gaussian_blur(image, sigma));
  ScalarField r(image.grid());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::hypot(grad[i].x, grad[i].y);

  const double lam = lambda ? *lambda : percentile(r.values(), 0.9);
  WeightMap out{ScalarField(image.grid(), 1.0), floor, lam};
  if (lam <= 0.0) return out;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s = r[i] / lam;
    out.g[i] = std::max(floor, 1.0 / (1.0 + s * s));
  }
  return out;
}

WeightMap weight_map(const ComplexField& xi, double sigma, std::optional<double> lambda, double floor) {
  return weight_map_from_image(adjoint(xi), sigma, lambda, floor);
}

}  // namespace mocomp
