#include "mocomp/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mocomp {

Grid2D::Grid2D(int w, int h, double s) : width(w), height(h), spacing(s) {
  if (w < 4 || h < 4) {
    throw InvalidParameter("grid must be at least 4x4, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  if (!(s > 0.0)) throw InvalidParameter("grid spacing must be positive");
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": grids differ (" + std::to_string(a.width) + "x" +
                       std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                       std::to_string(b.height) + ")");
  }
}

VectorField gradient(const ScalarField& f) {
  const int w = f.width(), h = f.height();
  VectorField g(f.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = f(x, y);
      g(x, y) = {x + 1 < w ? f(x + 1, y) - c : 0.0, y + 1 < h ? f(x, y + 1) - c : 0.0};
    }
  }
  return g;
}

ScalarField divergence(const VectorField& p) {
  const int w = p.width(), h = p.height();
  ScalarField d(p.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx;
      if (x == 0) dx = p(x, y).x;
      else if (x == w - 1) dx = -p(x - 1, y).x;
      else dx = p(x, y).x - p(x - 1, y).x;
      double dy;
      if (y == 0) dy = p(x, y).y;
      else if (y == h - 1) dy = -p(x, y - 1).y;
      else dy = p(x, y).y - p(x, y - 1).y;
      d(x, y) = dx + dy;
    }
  }
  return d;
}

TensorField displacement_gradient(const DisplacementField& z) {
  const int w = z.width(), h = z.height();
  TensorField m(z.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 c = z(x, y);
      const Vec2 dx = x + 1 < w ? z(x + 1, y) - c : Vec2{};
      const Vec2 dy = y + 1 < h ? z(x, y + 1) - c : Vec2{};
      m(x, y) = {dx.x, dy.x, dx.y, dy.y};
    }
  }
  return m;
}

VectorField row_divergence(const TensorField& m) {
  const int w = m.width(), h = m.height();
  VectorField d(m.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Mat2& c = m(x, y);
      Vec2 r{};
      if (x == 0) r += {c.a11, c.a21};
      else if (x == w - 1) r += {-m(x - 1, y).a11, -m(x - 1, y).a21};
      else r += {c.a11 - m(x - 1, y).a11, c.a21 - m(x - 1, y).a21};
      if (y == 0) r += {c.a12, c.a22};
      else if (y == h - 1) r += {-m(x, y - 1).a12, -m(x, y - 1).a22};
      else r += {c.a12 - m(x, y - 1).a12, c.a22 - m(x, y - 1).a22};
      d(x, y) = r;
    }
  }
  return d;
}

VectorField central_gradient(const ScalarField& f) {
  const int w = f.width(), h = f.height();
  VectorField g(f.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx, gy;
      if (x == 0) gx = f(1, y) - f(0, y);
      else if (x == w - 1) gx = f(x, y) - f(x - 1, y);
      else gx = 0.5 * (f(x + 1, y) - f(x - 1, y));
      if (y == 0) gy = f(x, 1) - f(x, 0);
      else if (y == h - 1) gy = f(x, y) - f(x, y - 1);
      else gy = 0.5 * (f(x, y + 1) - f(x, y - 1));
      g(x, y) = {gx, gy};
    }
  }
  return g;
}

namespace {

template <typename T>
T sample_impl(const Field<T>& f, double x, double y) noexcept {
  const int w = f.width(), h = f.height();
  if (!(x > -1.0 && x < w && y > -1.0 && y < h)) return T{};
  const double xf = std::floor(x), yf = std::floor(y);
  const int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);
  const double fx = x - xf, fy = y - yf;
  if (x0 >= 0 && y0 >= 0 && x0 + 1 < w && y0 + 1 < h) {
    const T* row = &f(x0, y0);
    const T top = (1.0 - fx) * row[0] + fx * row[1];
    const T bot = (1.0 - fx) * row[w] + fx * row[w + 1];
    return (1.0 - fy) * top + fy * bot;
  }
  auto at = [&](int xi, int yi) -> T {
    return (xi >= 0 && xi < w && yi >= 0 && yi < h) ? f(xi, yi) : T{};
  };
  if (fx == 0.0 && fy == 0.0) return at(x0, y0);
  const T top = (1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0);
  const T bot = (1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1);
  return (1.0 - fy) * top + fy * bot;
}

template <typename T>
Field<T> warp_impl(const Field<T>& f, const DisplacementField& z) {
  require_same_grid(f.grid(), z.grid(), "warp");
  const int w = f.width(), h = f.height();
  Field<T> out(f.grid());
  const T* src = f.values().data();
  const Vec2* disp = z.values().data();
  T* dst = out.values().data();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double sx = x + disp[i].x, sy = y + disp[i].y;
      const double xf = std::floor(sx), yf = std::floor(sy);
      const int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);
      if (x0 >= 0 && y0 >= 0 && x0 + 1 < w && y0 + 1 < h) {
        const double fx = sx - xf, fy = sy - yf;
        const T* row = src + static_cast<std::size_t>(y0) * w + x0;
        const T top = (1.0 - fx) * row[0] + fx * row[1];
        const T bot = (1.0 - fx) * row[w] + fx * row[w + 1];
        dst[i] = (1.0 - fy) * top + fy * bot;
      } else {
        dst[i] = sample_impl(f, sx, sy);
      }
    }
  }
  return out;
}

int reflect(int i, int n) noexcept {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

double sample_bilinear(const ScalarField& f, double x, double y) noexcept { return sample_impl(f, x, y); }
Vec2 sample_bilinear(const VectorField& f, double x, double y) noexcept { return sample_impl(f, x, y); }

ScalarField warp(const ScalarField& f, const DisplacementField& z) { return warp_impl(f, z); }
VectorField warp(const VectorField& f, const DisplacementField& z) { return warp_impl(f, z); }

ScalarField warp_adjoint(const ScalarField& g, const DisplacementField& z) {
  require_same_grid(g.grid(), z.grid(), "warp_adjoint");
  const int w = g.width(), h = g.height();
  ScalarField out(g.grid());
  auto add = [&](int xi, int yi, double v) {
    if (xi >= 0 && xi < w && yi >= 0 && yi < h) out(xi, yi) += v;
  };
  // Serial scatter keeps the summation order fixed.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sx = x + z(x, y).x, sy = y + z(x, y).y;
      if (!(sx > -1.0 && sx < w && sy > -1.0 && sy < h)) continue;
      const double xf = std::floor(sx), yf = std::floor(sy);
      const int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);
      const double fx = sx - xf, fy = sy - yf, v = g(x, y);
      add(x0, y0, (1.0 - fx) * (1.0 - fy) * v);
      add(x0 + 1, y0, fx * (1.0 - fy) * v);
      add(x0, y0 + 1, (1.0 - fx) * fy * v);
      add(x0 + 1, y0 + 1, fx * fy * v);
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& v : k) v /= total;
  return k;
}

ScalarField gaussian_blur(const ScalarField& f, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = f.width(), h = f.height();
  ScalarField tmp(f.grid()), out(f.grid());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * f(reflect(x + i, w), y);
      tmp(x, y) = acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp(x, reflect(y + i, h));
      out(x, y) = acc;
    }
  }
  return out;
}

// Reductions stay serial so results do not depend on the thread count.
double dot(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].x * b[i].x + a[i].y * b[i].y;
  return s;
}

double sum(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s;
}

double min_value(const ScalarField& f) { return *std::min_element(f.values().begin(), f.values().end()); }
double max_value(const ScalarField& f) { return *std::max_element(f.values().begin(), f.values().end()); }

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y) {
  require_same_grid(x.grid(), y.grid(), "axpby");
  ScalarField out(x.grid());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

}  // namespace mocomp
