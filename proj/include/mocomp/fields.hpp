#pragma once

// Grid-aligned containers and the finite-difference calculus shared by the
// whole solver. Every operation here is pure: inputs are never modified.
//
// Discretization:
//   gradient    forward differences, zero on the last column/row
//   divergence  backward differences, the exact negative adjoint of gradient
//   warp        bilinear interpolation, lattice points outside the grid read 0

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mocomp/errors.hpp"

namespace mocomp {

struct Grid2D {
  int width = 0;
  int height = 0;
  double spacing = 1.0;

  Grid2D() = default;
  Grid2D(int w, int h, double s = 1.0);

  std::size_t size() const noexcept { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width + x; }
  bool operator==(const Grid2D& o) const noexcept {
    return width == o.width && height == o.height && spacing == o.spacing;
  }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) noexcept { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) noexcept { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, const Vec2& a) noexcept { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Row-major 2x2 matrix. For a displacement gradient, row r holds the
/// gradient of component r: (a11, a12) = (dz1/dx, dz1/dy).
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() noexcept { return {1.0, 0.0, 0.0, 1.0}; }
  double det() const noexcept { return a11 * a22 - a12 * a21; }
  double frobenius2() const noexcept { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
  /// d(det)/dM
  Mat2 cofactor() const noexcept { return {a22, -a21, -a12, a11}; }
  Mat2 transpose() const noexcept { return {a11, a21, a12, a22}; }

  friend Mat2 operator+(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2 operator*(double s, const Mat2& a) noexcept {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(const Grid2D& grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  Field(const Grid2D& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GridMismatch("field value count does not match grid");
  }

  const Grid2D& grid() const noexcept { return grid_; }
  int width() const noexcept { return grid_.width; }
  int height() const noexcept { return grid_.height; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator()(int x, int y) noexcept { return values_[grid_.index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return values_[grid_.index(x, y)]; }
  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<T> values() & noexcept { return values_; }
  std::span<const T> values() const& noexcept { return values_; }
  // A temporary hands over its storage so `for (x : make().values())` stays valid.
  std::vector<T> values() && noexcept { return std::move(values_); }
  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Grid2D grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
using ComplexField = Field<std::complex<double>>;
using VectorField = Field<Vec2>;
/// Displacement z of a deformation phi = Id + z, in pixels.
using DisplacementField = Field<Vec2>;
using TensorField = Field<Mat2>;

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what);

/// Forward-difference gradient, zero on the last column (x) and row (y).
VectorField gradient(const ScalarField& f);
/// Backward-difference divergence; <gradient(f), p> = -<f, divergence(p)>.
ScalarField divergence(const VectorField& p);
/// Rows of the result are the forward-difference gradients of z1 and z2.
TensorField displacement_gradient(const DisplacementField& z);
/// Divergence of each row of m: (div(a11, a12), div(a21, a22)).
VectorField row_divergence(const TensorField& m);
/// Centered differences (one-sided at the border); used for image forces.
VectorField central_gradient(const ScalarField& f);

/// Bilinear sample of f at continuous pixel coordinates; 0 outside.
double sample_bilinear(const ScalarField& f, double x, double y) noexcept;
Vec2 sample_bilinear(const VectorField& f, double x, double y) noexcept;

/// out(x) = f(x + z(x)).
ScalarField warp(const ScalarField& f, const DisplacementField& z);
VectorField warp(const VectorField& f, const DisplacementField& z);
/// Transpose of the linear map f -> warp(f, z): scatters each value back onto
/// the four lattice points it was interpolated from.
ScalarField warp_adjoint(const ScalarField& g, const DisplacementField& z);

/// Separable Gaussian with standard deviation sigma, radius ceil(3 sigma),
/// renormalized taps and half-sample symmetric boundary.
ScalarField gaussian_blur(const ScalarField& f, double sigma);
std::vector<double> gaussian_kernel(double sigma);

// Small arithmetic helpers used across modules.
double dot(const ScalarField& a, const ScalarField& b);
double dot(const VectorField& a, const VectorField& b);
double sum(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
double max_abs(const ScalarField& f);
bool all_finite(const ScalarField& f);
ScalarField axpby(double a, const ScalarField& x, double b, const ScalarField& y);

}  // namespace mocomp
