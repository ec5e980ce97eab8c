#pragma once

#include "mocomp/fields.hpp"

namespace mocomp {

/// 10 log10(peak^2 / MSE); +inf for identical inputs.
double psnr(const ScalarField& a, const ScalarField& b, double peak);

/// Mutual information in nats from a bins x bins joint histogram; each image
/// is min-max normalized onto the bins. Constant images are rejected.
double mutual_information(const ScalarField& a, const ScalarField& b, int bins = 32);

/// Marginal entropy in nats with the same binning as mutual_information.
double entropy(const ScalarField& a, int bins = 32);

struct EndpointError {
  double mean = 0.0;
  double max = 0.0;
};

/// Per-pixel Euclidean error, skipping `interior_margin` pixels on each side.
EndpointError endpoint_error(const DisplacementField& z_est, const DisplacementField& z_true, int interior_margin);

/// Signed u - registered.
ScalarField difference_map(const ScalarField& u, const ScalarField& registered);

}  // namespace mocomp
