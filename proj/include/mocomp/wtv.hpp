#pragma once

#include <functional>

#include "mocomp/edge_weights.hpp"
#include "mocomp/fields.hpp"

namespace mocomp {

/// Discrete weighted total variation sum_x g(x) |grad f(x)|.
double tv_g(const ScalarField& f, const ScalarField& g);
inline double tv_g(const ScalarField& f, const WeightMap& g) { return tv_g(f, g.g); }

/// (1 / 2 theta) |f - w|^2 + TV_g(f)
double prox_objective(const ScalarField& f, const ScalarField& w, const ScalarField& g, double theta);

/// Called after every dual update with the iteration index (1-based), the
/// dual field and the current primal estimate.
using ProxObserver = std::function<void(int, const VectorField&, const ScalarField&)>;

/// Weighted-TV proximal map by Chambolle's projection:
///
///   f = w - theta div p
///   p <- (p + dt grad(div p - w/theta)) / (1 + (dt/g) |grad(div p - w/theta)|)
///
/// starting from p = 0. The dual constraint |p| <= g holds after each step.
ScalarField prox_wtv(const ScalarField& w, const ScalarField& g, double theta, int n_iter, double delta_t = 0.125,
                     const ProxObserver& observer = {});
inline ScalarField prox_wtv(const ScalarField& w, const WeightMap& g, double theta, int n_iter,
                            double delta_t = 0.125, const ProxObserver& observer = {}) {
  return prox_wtv(w, g.g, theta, n_iter, delta_t, observer);
}

}  // namespace mocomp
