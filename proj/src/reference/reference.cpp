#include "mocomp/reference.hpp"

#include <cmath>
#include <vector>

namespace mocomp::reference {

namespace {

struct Planes {
  int w, h;
  std::vector<double> x, y;
};

Planes forward_diff(const std::vector<double>& f, int w, int h) {
  Planes g{w, h, std::vector<double>(f.size(), 0.0), std::vector<double>(f.size(), 0.0)};
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const int k = j * w + i;
      if (i < w - 1) g.x[k] = f[k + 1] - f[k];
      if (j < h - 1) g.y[k] = f[k + w] - f[k];
    }
  return g;
}

std::vector<double> backward_div(const Planes& p) {
  const int w = p.w, h = p.h;
  std::vector<double> d(p.x.size(), 0.0);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const int k = j * w + i;
      const double px = i < w - 1 ? p.x[k] : 0.0;
      const double px_prev = i > 0 ? p.x[k - 1] : 0.0;
      const double py = j < h - 1 ? p.y[k] : 0.0;
      const double py_prev = j > 0 ? p.y[k - w] : 0.0;
      d[k] = (px - px_prev) + (py - py_prev);
    }
  return d;
}

std::vector<double> to_vec(const ScalarField& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Planes g = forward_diff(to_vec(f), f.width(), f.height());
  VectorField out(f.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {g.x[k], g.y[k]};
  return out;
}

ScalarField divergence(const VectorField& p) {
  Planes planes{p.width(), p.height(), std::vector<double>(p.size()), std::vector<double>(p.size())};
  for (std::size_t k = 0; k < p.size(); ++k) {
    planes.x[k] = p[k].x;
    planes.y[k] = p[k].y;
  }
  return ScalarField(p.grid(), backward_div(planes));
}

ScalarField warp(const ScalarField& f, const DisplacementField& z) {
  const int w = f.width(), h = f.height();
  auto value = [&](long i, long j) -> double {
    if (i < 0 || j < 0 || i >= w || j >= h) return 0.0;
    return f(static_cast<int>(i), static_cast<int>(j));
  };
  ScalarField out(f.grid());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const double sx = i + z(i, j).x, sy = j + z(i, j).y;
      const long i0 = static_cast<long>(std::floor(sx)), j0 = static_cast<long>(std::floor(sy));
      const double a = sx - i0, b = sy - j0;
      out(i, j) = (1 - a) * (1 - b) * value(i0, j0) + a * (1 - b) * value(i0 + 1, j0) +
                  (1 - a) * b * value(i0, j0 + 1) + a * b * value(i0 + 1, j0 + 1);
    }
  return out;
}

ScalarField gaussian_blur(const ScalarField& f, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k;
  double total = 0.0;
  for (int i = -r; i <= r; ++i) {
    k.push_back(std::exp(-(i * i) / (2.0 * sigma * sigma)));
    total += k.back();
  }
  const int w = f.width(), h = f.height();
  auto mirror = [](int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
    return i;
  };
  // Direct 2D convolution with the outer-product kernel.
  ScalarField out(f.grid());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      double acc = 0.0;
      for (int b = -r; b <= r; ++b)
        for (int a = -r; a <= r; ++a) acc += k[a + r] * k[b + r] * f(mirror(i + a, w), mirror(j + b, h));
      out(i, j) = acc / (total * total);
    }
  return out;
}

ScalarField jacobian_determinant(const DisplacementField& z) {
  const int w = z.width(), h = z.height();
  ScalarField det(z.grid());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const double d1x = i < w - 1 ? z(i + 1, j).x - z(i, j).x : 0.0;
      const double d1y = j < h - 1 ? z(i, j + 1).x - z(i, j).x : 0.0;
      const double d2x = i < w - 1 ? z(i + 1, j).y - z(i, j).y : 0.0;
      const double d2y = j < h - 1 ? z(i, j + 1).y - z(i, j).y : 0.0;
      det(i, j) = (1 + d1x) * (1 + d2y) - d1y * d2x;
    }
  return det;
}

TensorField update_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma, double dt) {
  const int w = z.width(), h = z.height();
  TensorField out(v.grid());
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const double dz1dx = i < w - 1 ? z(i + 1, j).x - z(i, j).x : 0.0;
      const double dz1dy = j < h - 1 ? z(i, j + 1).x - z(i, j).x : 0.0;
      const double dz2dx = i < w - 1 ? z(i + 1, j).y - z(i, j).y : 0.0;
      const double dz2dy = j < h - 1 ? z(i, j + 1).y - z(i, j).y : 0.0;
      const Mat2& m = v(i, j);
      const double v11 = m.a11, v12 = m.a12, v21 = m.a21, v22 = m.a22;
      // Component updates written out as in the semi-implicit scheme.
      const double norm2 = (v11 + 1) * (v11 + 1) + v12 * v12 + v21 * v21 + (v22 + 1) * (v22 + 1);
      const double det = (v11 + 1) * (v22 + 1) - v12 * v21;
      const double c0 = std::pow(det - 1.0 / det, 3);
      const double c1 = 1.0 + 1.0 / (det * det);
      const double s = 1.0 / (1.0 + dt * gamma);
      out(i, j) = {
          s * (v11 + dt * (-4 * p.a1 * norm2 * (v11 + 1) - 4 * p.a2 * (1 + v22) * c0 * c1 + gamma * dz1dx)),
          s * (v12 + dt * (-4 * p.a1 * norm2 * v12 + 4 * p.a2 * v21 * c0 * c1 + gamma * dz1dy)),
          s * (v21 + dt * (-4 * p.a1 * norm2 * v21 + 4 * p.a2 * v12 * c0 * c1 + gamma * dz2dx)),
          s * (v22 + dt * (-4 * p.a1 * norm2 * (v22 + 1) - 4 * p.a2 * (1 + v11) * c0 * c1 + gamma * dz2dy)),
      };
    }
  return out;
}

ScalarField prox_wtv(const ScalarField& w, const ScalarField& g, double theta, int n_iter, double delta_t) {
  const int width = w.width(), height = w.height();
  const std::vector<double> wv = to_vec(w);
  Planes p{width, height, std::vector<double>(wv.size(), 0.0), std::vector<double>(wv.size(), 0.0)};
  for (int it = 0; it < n_iter; ++it) {
    const std::vector<double> d = backward_div(p);
    std::vector<double> hv(wv.size());
    for (std::size_t k = 0; k < wv.size(); ++k) hv[k] = d[k] - wv[k] / theta;
    const Planes gh = forward_diff(hv, width, height);
    for (std::size_t k = 0; k < wv.size(); ++k) {
      const double mag = std::sqrt(gh.x[k] * gh.x[k] + gh.y[k] * gh.y[k]);
      const double denom = 1.0 + delta_t * mag / g[k];
      p.x[k] = (p.x[k] + delta_t * gh.x[k]) / denom;
      p.y[k] = (p.y[k] + delta_t * gh.y[k]) / denom;
    }
  }
  const std::vector<double> d = backward_div(p);
  ScalarField f(w.grid());
  for (std::size_t k = 0; k < wv.size(); ++k) f[k] = wv[k] - theta * d[k];
  return f;
}

ScalarField chambolle_tv(const ScalarField& w, double theta, int n_iter, double tau) {
  const int width = w.width(), height = w.height();
  const std::vector<double> wv = to_vec(w);
  Planes p{width, height, std::vector<double>(wv.size(), 0.0), std::vector<double>(wv.size(), 0.0)};
  for (int it = 0; it < n_iter; ++it) {
    const std::vector<double> d = backward_div(p);
    std::vector<double> hv(wv.size());
    for (std::size_t k = 0; k < wv.size(); ++k) hv[k] = d[k] - wv[k] / theta;
    const Planes gh = forward_diff(hv, width, height);
    for (std::size_t k = 0; k < wv.size(); ++k) {
      const double denom = 1.0 + tau * std::hypot(gh.x[k], gh.y[k]);
      p.x[k] = (p.x[k] + tau * gh.x[k]) / denom;
      p.y[k] = (p.y[k] + tau * gh.y[k]) / denom;
    }
  }
  const std::vector<double> d = backward_div(p);
  ScalarField f(w.grid());
  for (std::size_t k = 0; k < wv.size(); ++k) f[k] = wv[k] - theta * d[k];
  return f;
}

}  // namespace mocomp::reference
