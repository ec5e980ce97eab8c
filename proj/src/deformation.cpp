#include "mocomp/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fftw_plans.hpp"

namespace mocomp {

ScalarField jacobian_determinant(const DisplacementField& z) {
  const int w = z.width(), h = z.height();
  ScalarField det(z.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 c = z(x, y);
      const Vec2 dx = x + 1 < w ? z(x + 1, y) - c : Vec2{};
      const Vec2 dy = y + 1 < h ? z(x, y + 1) - c : Vec2{};
      det(x, y) = (1.0 + dx.x) * (1.0 + dy.y) - dy.x * dx.y;
    }
  }
  return det;
}

DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner) {
  require_same_grid(outer.grid(), inner.grid(), "compose");
  DisplacementField c = warp(outer, inner);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += inner[i];
  return c;
}

void clamp_boundary(DisplacementField& z) {
  const int w = z.width(), h = z.height();
  for (int x = 0; x < w; ++x) z(x, 0) = z(x, h - 1) = Vec2{};
  for (int y = 0; y < h; ++y) z(0, y) = z(w - 1, y) = Vec2{};
}

namespace {

// Eigenvalues of the negative 1D Dirichlet Laplacian on n interior points.
std::vector<double> dirichlet_eigenvalues(int n) {
  std::vector<double> mu(n);
  for (int k = 0; k < n; ++k) mu[k] = 2.0 - 2.0 * std::cos(std::numbers::pi * (k + 1) / (n + 1));
  return mu;
}

// Apply (I - alpha Lap) with the 5-point stencil on the interior; border of z is zero.
Vec2 screened_apply(const DisplacementField& z, int x, int y, double alpha) {
  const Vec2 c = z(x, y);
  const Vec2 lap = z(x - 1, y) + z(x + 1, y) + z(x, y - 1) + z(x, y + 1) - 4.0 * c;
  return c - alpha * lap;
}

}  // namespace

DisplacementField solve_screened_poisson(const DisplacementField& b, double alpha) {
  const int nx = b.width() - 2, ny = b.height() - 2;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  const std::vector<double> mx = dirichlet_eigenvalues(nx), my = dirichlet_eigenvalues(ny);
  const fftw_plan plan = detail::cached_plan(detail::PlanKind::kDst1, nx, ny);
  const double norm = 1.0 / (4.0 * (nx + 1) * (ny + 1));

  auto in = detail::alloc_real(n);
  auto out = detail::alloc_real(n);
  DisplacementField x(b.grid());
  for (int comp = 0; comp < 2; ++comp) {
    for (int y = 0; y < ny; ++y)
      for (int xi = 0; xi < nx; ++xi) {
        const Vec2& v = b(xi + 1, y + 1);
        in[static_cast<std::size_t>(y) * nx + xi] = comp == 0 ? v.x : v.y;
      }
    fftw_execute_r2r(plan, in.get(), out.get());
    for (int l = 0; l < ny; ++l)
      for (int k = 0; k < nx; ++k) out[static_cast<std::size_t>(l) * nx + k] /= 1.0 + alpha * (mx[k] + my[l]);
    fftw_execute_r2r(plan, out.get(), in.get());
    for (int y = 0; y < ny; ++y)
      for (int xi = 0; xi < nx; ++xi) {
        const double v = in[static_cast<std::size_t>(y) * nx + xi] * norm;
        (comp == 0 ? x(xi + 1, y + 1).x : x(xi + 1, y + 1).y) = v;
      }
  }
  return x;
}

PhiStep update_phi_step(const DisplacementField& z, const TensorField& v, const ScalarField& w,
                        const ScalarField& u, const FlowParams& params) {
  require_same_grid(z.grid(), v.grid(), "update_phi");
  require_same_grid(z.grid(), w.grid(), "update_phi");
  require_same_grid(z.grid(), u.grid(), "update_phi");

  const VectorField div_v = row_divergence(v);
  const ScalarField w_phi = warp(w, z);
  const VectorField grad_w_phi = warp(central_gradient(w), z);

  VectorField force(z.grid());
  const double k = params.dt * params.gamma2;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Vec2 q = grad_w_phi[i];
    Vec2 s = (-k * (w_phi[i] - u[i]) / (1.0 + k * (q.x * q.x + q.y * q.y))) * q;
    const double len = std::hypot(s.x, s.y);
    if (params.max_force_step > 0.0 && len > params.max_force_step) s = (params.max_force_step / len) * s;
    force[i] = s;
  }

  DisplacementField rhs(z.grid());
  double max_increment = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Vec2 incr = force[i] - (params.dt * params.gamma1) * div_v[i];
    rhs[i] = z[i] + incr;
    max_increment = std::max(max_increment, std::hypot(incr.x, incr.y));
  }
  clamp_boundary(rhs);

  const double alpha = params.dt * params.gamma1;
  PhiStep step{solve_screened_poisson(rhs, alpha), 0.0, max_increment};

  double r2 = 0.0, b2 = 0.0;
  for (int y = 1; y < z.height() - 1; ++y)
    for (int x = 1; x < z.width() - 1; ++x) {
      const Vec2 d = screened_apply(step.z, x, y, alpha) - rhs(x, y);
      r2 += d.x * d.x + d.y * d.y;
      b2 += rhs(x, y).x * rhs(x, y).x + rhs(x, y).y * rhs(x, y).y;
    }
  step.residual = b2 > 0.0 ? std::sqrt(r2 / b2) : std::sqrt(r2);
  if (!(step.residual < 1e-8)) throw SolverError("update_phi: implicit solve did not converge", step.residual);
  return step;
}

DisplacementField update_phi(const DisplacementField& z, const TensorField& v, const ScalarField& w,
                             const ScalarField& u, const FlowParams& params) {
  return update_phi_step(z, v, w, u, params).z;
}

InverseResult invert(const DisplacementField& z, double tol, int max_iter) {
  InverseResult r;
  r.z_inv = DisplacementField(z.grid());
  for (std::size_t i = 0; i < z.size(); ++i) r.z_inv[i] = -1.0 * z[i];

  double prev = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int it = 0; it < max_iter; ++it) {
    const DisplacementField sampled = warp(z, r.z_inv);
    double delta = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Vec2 next = -1.0 * sampled[i];
      delta = std::max(delta, std::hypot(next.x - r.z_inv[i].x, next.y - r.z_inv[i].y));
      r.z_inv[i] = next;
    }
    r.iterations = it + 1;
    if (!std::isfinite(delta)) throw InversionFailed("invert: non-finite update");
    if (delta < tol) break;
    growing = delta > prev ? growing + 1 : 0;
    if (growing >= 10) throw InversionFailed("invert: fixed-point iteration is not contracting");
    prev = delta;
  }

  const DisplacementField err = compose(z, r.z_inv);
  for (const Vec2& e : err.values()) r.residual = std::max(r.residual, std::hypot(e.x, e.y));
  return r;
}

DisplacementField DeformationState::total() const {
  DisplacementField acc = z;
  for (auto it = saved.rbegin(); it != saved.rend(); ++it) acc = compose(*it, acc);
  return acc;
}

RegridResult regrid_if_needed(DeformationState state, TensorField v, ScalarField w, double det_floor) {
  if (min_value(jacobian_determinant(state.z)) >= det_floor) {
    return {std::move(state), std::move(v), std::move(w), false};
  }
  return regrid(std::move(state), std::move(v), std::move(w));
}

RegridResult regrid(DeformationState state, TensorField v, ScalarField w) {
  w = warp(w, state.z);
  state.saved.push_back(std::move(state.z));
  state.z = DisplacementField(state.saved.back().grid());
  v = TensorField(v.grid());
  ++state.regrid_count;
  return {std::move(state), std::move(v), std::move(w), true};
}

}  // namespace mocomp
