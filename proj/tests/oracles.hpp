#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance run. They use nothing from the library beyond its value types
// and w_op, which has its own closed-form tests.

#include <cmath>
#include <random>
#include <vector>

#include "mocomp/hyperelastic.hpp"

namespace testutil {

// Random F with det(F) drawn uniformly from [lo, hi].
inline mocomp::Mat2 random_matrix_with_det(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> e(-1.5, 1.5), d(lo, hi);
  for (;;) {
    mocomp::Mat2 m{e(rng), e(rng), e(rng), e(rng)};
    const double det = m.det();
    if (!(det > 0.05)) continue;
    // Rescale onto the requested determinant; det scales quadratically.
    const double s = std::sqrt(d(rng) / det);
    return s * m;
  }
}

inline mocomp::Mat2 fd_gradient(const mocomp::Mat2& F, const mocomp::OgdenParams& p, double h) {
  auto at = [&](int k, double delta) {
    mocomp::Mat2 G = F;
    double* e[4] = {&G.a11, &G.a12, &G.a21, &G.a22};
    *e[k] += delta;
    return mocomp::w_op(G, p);
  };
  double g[4];
  for (int k = 0; k < 4; ++k) g[k] = (at(k, h) - at(k, -h)) / (2.0 * h);
  return {g[0], g[1], g[2], g[3]};
}

// Independent dual projected-gradient solver for
//   min_f 1/(2 theta)|f - w|^2 + sum g |grad f|,
// written against plain arrays. Dual: f = w - theta div p with |p| <= g,
// minimize 1/2 |theta div p - w|^2 by projected gradient steps.
struct DualTvOracle {
  int n, m;
  std::vector<double> w, g;

  void grad(const std::vector<double>& f, std::vector<double>& gx, std::vector<double>& gy) const {
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < n; ++x) {
        const int k = y * n + x;
        gx[k] = x + 1 < n ? f[k + 1] - f[k] : 0.0;
        gy[k] = y + 1 < m ? f[k + n] - f[k] : 0.0;
      }
  }
  // Backward-difference divergence, the negative adjoint of grad.
  void div(const std::vector<double>& px, const std::vector<double>& py, std::vector<double>& d) const {
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < n; ++x) {
        const int k = y * n + x;
        double v = 0.0;
        if (x + 1 < n) v += px[k];
        if (x > 0) v -= px[k - 1];
        if (y + 1 < m) v += py[k];
        if (y > 0) v -= py[k - n];
        d[k] = v;
      }
  }
  double objective(const std::vector<double>& f, double theta) const {
    std::vector<double> gx(f.size()), gy(f.size());
    grad(f, gx, gy);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      s += (f[k] - w[k]) * (f[k] - w[k]) / (2.0 * theta) + g[k] * std::hypot(gx[k], gy[k]);
    return s;
  }
  std::vector<double> solve(double theta, int iters) const {
    const std::size_t N = w.size();
    std::vector<double> px(N, 0.0), py(N, 0.0), d(N), r(N), gx(N), gy(N);
    const double tau = 1.0 / (8.0 * theta * theta) * 0.99;
    for (int it = 0; it < iters; ++it) {
      div(px, py, d);
      for (std::size_t k = 0; k < N; ++k) r[k] = theta * d[k] - w[k];
      grad(r, gx, gy);
      for (std::size_t k = 0; k < N; ++k) {
        // gradient of 1/2|theta div p - w|^2 w.r.t. p is -theta grad(r)
        double qx = px[k] + tau * theta * gx[k], qy = py[k] + tau * theta * gy[k];
        const double len = std::hypot(qx, qy);
        if (len > g[k]) qx *= g[k] / len, qy *= g[k] / len;
        px[k] = qx;
        py[k] = qy;
      }
    }
    div(px, py, d);
    std::vector<double> f(N);
    for (std::size_t k = 0; k < N; ++k) f[k] = w[k] - theta * d[k];
    return f;
  }
};

}  // namespace testutil
