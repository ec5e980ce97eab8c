#pragma once

#include <optional>

#include "mocomp/fields.hpp"

namespace mocomp {

/// Edge-stopping weights g in [floor, 1] for the weighted TV.
struct WeightMap {
  ScalarField g;
  double floor = 0.01;
  /// Contrast parameter actually used.
  double lambda = 0.0;
};

/// Uniform weight g = 1 on a grid.
WeightMap unit_weights(const Grid2D& grid);

/// Smooth edge-stopping function of the blurred gradient magnitude.
///
/// r = |grad(G_sigma * image)|, g = max(floor, 1 / (1 + (r / lambda)^2)).
/// When lambda is not given it is the 90th percentile of r; if that is zero
/// (a flat image) g is 1 everywhere.
WeightMap weight_map_from_image(const ScalarField& image, double sigma, std::optional<double> lambda = std::nullopt,
                                double floor = 0.01);

/// Same, starting from an acquisition: image = adjoint(xi).
WeightMap weight_map(const ComplexField& xi, double sigma, std::optional<double> lambda = std::nullopt,
                     double floor = 0.01);

/// Linear-interpolated percentile, q in [0, 1].
double percentile(std::span<const double> values, double q);

}  // namespace mocomp
