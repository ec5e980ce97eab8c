#include "mocomp/wtv.hpp"

#include <cmath>

namespace mocomp {

double tv_g(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "tv_g");
  const VectorField grad = gradient(f);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += g[i] * std::hypot(grad[i].x, grad[i].y);
  return s;
}

double prox_objective(const ScalarField& f, const ScalarField& w, const ScalarField& g, double theta) {
  require_same_grid(f.grid(), w.grid(), "prox_objective");
  double fit = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) fit += (f[i] - w[i]) * (f[i] - w[i]);
  return fit / (2.0 * theta) + tv_g(f, g);
}

ScalarField prox_wtv(const ScalarField& w, const ScalarField& g, double theta, int n_iter, double delta_t,
                     const ProxObserver& observer) {
  require_same_grid(w.grid(), g.grid(), "prox_wtv");
  if (!(theta > 0.0)) throw InvalidParameter("prox_wtv: theta must be positive");
  if (!(delta_t > 0.0 && delta_t <= 0.125)) throw InvalidParameter("prox_wtv: delta_t must lie in (0, 1/8]");
  if (n_iter < 1) throw InvalidParameter("prox_wtv: at least one iteration is required");

  const int width = w.width(), height = w.height();
  const double inv_theta = 1.0 / theta;
  VectorField p(w.grid());
  ScalarField h(w.grid());

  auto primal = [&](const VectorField& dual) {
    const ScalarField d = divergence(dual);
    ScalarField f(w.grid());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = w[i] - theta * d[i];
    return f;
  };

  for (int it = 1; it <= n_iter; ++it) {
    const ScalarField div_p = divergence(p);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = div_p[i] - w[i] * inv_theta;

#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double c = h(x, y);
        const double gx = x + 1 < width ? h(x + 1, y) - c : 0.0;
        const double gy = y + 1 < height ? h(x, y + 1) - c : 0.0;
        const double denom = 1.0 + delta_t / g(x, y) * std::sqrt(gx * gx + gy * gy);
        Vec2& q = p(x, y);
        q = {(q.x + delta_t * gx) / denom, (q.y + delta_t * gy) / denom};
      }
    }
    if (observer) observer(it, p, primal(p));
  }
  return primal(p);
}

}  // namespace mocomp
