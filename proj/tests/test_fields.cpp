#include <cmath>
#include <random>

#include "doctest.h"
#include "mocomp/fields.hpp"
#include "test_util.hpp"

using namespace mocomp;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid2D(3, 8), InvalidParameter);
  CHECK_THROWS_AS(Grid2D(8, 8, 0.0), InvalidParameter);
  CHECK_NOTHROW(Grid2D(4, 4));
  CHECK_THROWS_AS(ScalarField(Grid2D(4, 4), std::vector<double>(15)), GridMismatch);
}

TEST_CASE("gradient of constant and ramp") {
  const Grid2D g(7, 5);
  const ScalarField c(g, 3.5);
  for (const Vec2& v : gradient(c).values()) CHECK(v == Vec2{0.0, 0.0});

  ScalarField ramp(g);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) ramp(x, y) = x;
  const VectorField gr = gradient(ramp);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width - 1; ++x) {
      CHECK(gr(x, y).x == 1.0);
      CHECK(gr(x, y).y == 0.0);
    }
  // far boundary is one-sided: no neighbour, zero difference
  CHECK(gr(g.width - 1, 2).x == 0.0);
}

TEST_CASE("gradient matches per-pixel difference oracle") {
  std::mt19937_64 rng(11);
  const Grid2D g(5, 5);
  const ScalarField f = testutil::random_scalar(g, rng);
  const VectorField gr = gradient(f);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      const double ex = x + 1 < 5 ? f(x + 1, y) - f(x, y) : 0.0;
      const double ey = y + 1 < 5 ? f(x, y + 1) - f(x, y) : 0.0;
      CHECK(gr(x, y).x == ex);
      CHECK(gr(x, y).y == ey);
    }
}

TEST_CASE("divergence is the negative adjoint of gradient") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Grid2D g(8, 8);
    const ScalarField f = testutil::random_scalar(g, rng);
    const VectorField p = testutil::random_vector(g, rng);
    const double lhs = dot(gradient(f), p);
    const double rhs = -dot(f, divergence(p));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
  const Grid2D g(6, 9);
  for (double v : divergence(VectorField(g)).values()) CHECK(v == 0.0);
}

TEST_CASE("divergence of (x, y) is 2 in the interior") {
  const Grid2D g(9, 7);
  VectorField p(g);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) p(x, y) = {double(x), double(y)};
  const ScalarField d = divergence(p);
  for (int y = 1; y < g.height - 1; ++y)
    for (int x = 1; x < g.width - 1; ++x) CHECK(d(x, y) == doctest::Approx(2.0));
}

TEST_CASE("displacement gradient rows and row divergence") {
  std::mt19937_64 rng(8);
  const Grid2D g(6, 7);
  const DisplacementField z = testutil::random_vector(g, rng);
  ScalarField z1(g), z2(g);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z1[i] = z[i].x;
    z2[i] = z[i].y;
  }
  const TensorField m = displacement_gradient(z);
  const VectorField g1 = gradient(z1), g2 = gradient(z2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i].a11 == g1[i].x);
    CHECK(m[i].a12 == g1[i].y);
    CHECK(m[i].a21 == g2[i].x);
    CHECK(m[i].a22 == g2[i].y);
  }
  VectorField r1(g), r2(g);
  for (std::size_t i = 0; i < m.size(); ++i) {
    r1[i] = {m[i].a11, m[i].a12};
    r2[i] = {m[i].a21, m[i].a22};
  }
  const VectorField rd = row_divergence(m);
  const ScalarField d1 = divergence(r1), d2 = divergence(r2);
  for (std::size_t i = 0; i < rd.size(); ++i) {
    CHECK(rd[i].x == doctest::Approx(d1[i]));
    CHECK(rd[i].y == doctest::Approx(d2[i]));
  }
}

TEST_CASE("warp") {
  std::mt19937_64 rng(3);
  const Grid2D g(10, 8);
  const ScalarField f = testutil::random_scalar(g, rng);

  SUBCASE("zero displacement is bit-exact identity") { CHECK(warp(f, DisplacementField(g)) == f); }

  SUBCASE("integer translation moves an impulse by one pixel") {
    ScalarField imp(g);
    imp(5, 4) = 1.0;
    const ScalarField out = warp(imp, DisplacementField(g, Vec2{1.0, 0.0}));
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) CHECK(out(x, y) == (x == 4 && y == 4 ? 1.0 : 0.0));
  }

  SUBCASE("half-pixel shift of a ramp") {
    ScalarField ramp(g);
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) ramp(x, y) = 2.0 * x + 0.5 * y;
    const ScalarField out = warp(ramp, DisplacementField(g, Vec2{0.5, 0.0}));
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width - 1; ++x) CHECK(out(x, y) == doctest::Approx(ramp(x, y) + 1.0));
  }

  SUBCASE("samples outside read zero") {
    const ScalarField out = warp(ScalarField(g, 1.0), DisplacementField(g, Vec2{-0.5, 0.0}));
    CHECK(out(0, 3) == doctest::Approx(0.5));
    CHECK(out(1, 3) == doctest::Approx(1.0));
  }

  SUBCASE("output bounded by max |f|") {
    const DisplacementField z = testutil::random_vector(g, rng, 3.0);
    const ScalarField out = warp(f, z);
    CHECK(max_abs(out) <= max_abs(f) + 1e-15);
  }
}

TEST_CASE("gaussian blur") {
  SUBCASE("constant field is preserved") {
    const ScalarField c(Grid2D(12, 9), 2.25);
    for (double v : gaussian_blur(c, 2.0).values()) CHECK(v == doctest::Approx(2.25).epsilon(1e-14));
  }
  SUBCASE("impulse reproduces the normalized sampled kernel") {
    const Grid2D g(31, 31);
    ScalarField imp(g);
    imp(15, 15) = 1.0;
    const ScalarField out = gaussian_blur(imp, 2.0);
    // independent kernel: exp(-i^2 / (2 sigma^2)) over |i| <= ceil(3 sigma), normalized
    const int r = 6;
    double s = 0.0;
    for (int i = -r; i <= r; ++i) s += std::exp(-i * i / 8.0);
    for (int y = 0; y < 31; ++y)
      for (int x = 0; x < 31; ++x) {
        const int dx = x - 15, dy = y - 15;
        const double expect =
            std::abs(dx) <= r && std::abs(dy) <= r ? std::exp(-dx * dx / 8.0) * std::exp(-dy * dy / 8.0) / (s * s) : 0.0;
        CHECK(out(x, y) == doctest::Approx(expect).epsilon(1e-12).scale(1e-15));
      }
    const std::vector<double> k = gaussian_kernel(2.0);
    CHECK(k.size() == 13);
  }
  SUBCASE("symmetric input gives symmetric output") {
    const Grid2D g(16, 16);
    std::mt19937_64 rng(4);
    ScalarField f = testutil::random_scalar(g, rng);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 8; ++x) f(15 - x, y) = f(x, y);
    const ScalarField out = gaussian_blur(f, 1.5);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 8; ++x) CHECK(out(x, y) == doctest::Approx(out(15 - x, y)).epsilon(1e-13));
  }
  SUBCASE("mean preserved on large fields") {
    std::mt19937_64 rng(9);
    const ScalarField f = testutil::random_scalar(Grid2D(32, 32), rng, 0.0, 1.0);
    const double m0 = sum(f), m1 = sum(gaussian_blur(f, 2.0));
    CHECK(std::abs(m1 - m0) < 1e-3 * std::abs(m0));
  }
  SUBCASE("non-positive sigma rejected") {
    CHECK_THROWS_AS(gaussian_blur(ScalarField(Grid2D(8, 8)), 0.0), InvalidParameter);
  }
}

TEST_CASE("grid mismatch is reported") {
  CHECK_THROWS_AS(warp(ScalarField(Grid2D(8, 8)), DisplacementField(Grid2D(8, 9))), GridMismatch);
  CHECK_THROWS_AS(dot(ScalarField(Grid2D(8, 8)), ScalarField(Grid2D(9, 8))), GridMismatch);
}
