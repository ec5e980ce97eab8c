#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "mocomp/metrics.hpp"
#include "test_util.hpp"

using namespace mocomp;

TEST_CASE("psnr") {
  std::mt19937_64 rng(1);
  const Grid2D g(16, 16);
  const ScalarField a = testutil::random_scalar(g, rng), b = testutil::random_scalar(g, rng);
  CHECK(psnr(a, a, 1.0) == std::numeric_limits<double>::infinity());

  ScalarField shifted = a;
  for (double& v : shifted.values()) v += 2.0;  // MSE = 4 = peak^2
  CHECK(psnr(a, shifted, 2.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) se += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(std::abs(psnr(a, b, 1.5) - 10.0 * std::log10(1.5 * 1.5 / (se / a.size()))) < 1e-10);

  CHECK_THROWS_AS(psnr(a, ScalarField(Grid2D(4, 4)), 1.0), GridMismatch);
  CHECK_THROWS_AS(psnr(a, b, 0.0), InvalidParameter);
}

TEST_CASE("psnr falls as independent noise grows") {
  std::mt19937_64 rng(9);
  const Grid2D g(64, 64);
  const ScalarField truth = testutil::smooth_image(g);
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma : {0.01, 0.05, 0.2}) {
    std::normal_distribution<double> n(0.0, sigma);
    ScalarField noisy = truth;
    for (double& v : noisy.values()) v += n(rng);
    const double p = psnr(noisy, truth, 1.0);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("mutual information identities") {
  std::mt19937_64 rng(2);
  const Grid2D g(64, 64);
  const ScalarField a = testutil::smooth_image(g), b = testutil::random_scalar(g, rng);
  CHECK(mutual_information(a, a) == doctest::Approx(entropy(a)).epsilon(1e-12));
  CHECK(mutual_information(a, b) == mutual_information(b, a));
  CHECK(mutual_information(a, b, 8) >= -1e-12);
  // An invertible intensity map keeps every bin pairing.
  ScalarField scaled = a;
  for (double& v : scaled.values()) v = 3.0 * v - 1.0;
  CHECK(mutual_information(a, scaled) == doctest::Approx(entropy(a)).epsilon(1e-9));
  CHECK_THROWS_AS(mutual_information(a, ScalarField(g, 1.0)), DegenerateInput);
  CHECK_THROWS_AS(mutual_information(a, b, 1), InvalidParameter);
  CHECK_THROWS_AS(mutual_information(a, ScalarField(Grid2D(8, 8))), GridMismatch);
}

TEST_CASE("independent fields: mutual information is the histogram bias and vanishes with N") {
  // The plug-in estimate of independent uniform fields is positive by
  // (bins - 1)^2 / (2 N) to first order; it shrinks to 0 as N grows.
  std::mt19937_64 rng(3);
  for (int n : {64, 256}) {
    const Grid2D g(n, n);
    const double bias = 31.0 * 31.0 / (2.0 * n * n);
    for (int trial = 0; trial < 3; ++trial) {
      const ScalarField a = testutil::random_scalar(g, rng), b = testutil::random_scalar(g, rng);
      const double mi = mutual_information(a, b);
      CHECK(mi == doctest::Approx(bias).epsilon(0.15));
      if (n == 256) CHECK(mi < 0.05);
    }
  }
}

TEST_CASE("mutual information matches a direct histogram computation") {
  std::mt19937_64 rng(4);
  const Grid2D g(20, 15);
  const ScalarField a = testutil::random_scalar(g, rng), b = testutil::random_scalar(g, rng, -3.0, 5.0);
  const int bins = 7;
  auto bin = [&](const ScalarField& f, std::size_t i) {
    const double lo = min_value(f), hi = max_value(f);
    return std::min(bins - 1, static_cast<int>(std::floor((f[i] - lo) / (hi - lo) * bins)));
  };
  std::vector<double> joint(bins * bins), pa(bins), pb(bins);
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[bin(a, i) * bins + bin(b, i)] += 1.0 / a.size();
    pa[bin(a, i)] += 1.0 / a.size();
    pb[bin(b, i)] += 1.0 / a.size();
  }
  double mi = 0.0;
  for (int x = 0; x < bins; ++x)
    for (int y = 0; y < bins; ++y)
      if (joint[x * bins + y] > 0) mi += joint[x * bins + y] * std::log(joint[x * bins + y] / (pa[x] * pb[y]));
  CHECK(mutual_information(a, b, bins) == doctest::Approx(mi).epsilon(1e-12));
}

TEST_CASE("endpoint error") {
  std::mt19937_64 rng(5);
  const Grid2D g(12, 10);
  const DisplacementField z = testutil::random_vector(g, rng);
  const EndpointError same = endpoint_error(z, z, 2);
  CHECK(same.mean == 0.0);
  CHECK(same.max == 0.0);

  DisplacementField off = z;
  for (Vec2& v : off.values()) v += Vec2{0.3, 0.4};
  const EndpointError e = endpoint_error(off, z, 1);
  CHECK(e.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e.max == doctest::Approx(0.5).epsilon(1e-12));

  const DisplacementField r = testutil::random_vector(g, rng);
  double sum = 0.0, mx = 0.0;
  int n = 0;
  for (int y = 3; y < 7; ++y)
    for (int x = 3; x < 9; ++x, ++n) {
      const double d = std::hypot(r(x, y).x - z(x, y).x, r(x, y).y - z(x, y).y);
      sum += d;
      mx = std::max(mx, d);
    }
  const EndpointError er = endpoint_error(r, z, 3);
  CHECK(er.mean == doctest::Approx(sum / n).epsilon(1e-12));
  CHECK(er.max == mx);

  CHECK_THROWS_AS(endpoint_error(r, z, 5), InvalidParameter);
  CHECK_THROWS_AS(endpoint_error(r, DisplacementField(Grid2D(4, 4)), 0), GridMismatch);
}

TEST_CASE("difference map") {
  std::mt19937_64 rng(6);
  const Grid2D g(9, 9);
  const ScalarField a = testutil::random_scalar(g, rng), b = testutil::random_scalar(g, rng);
  for (double v : difference_map(a, a).values()) CHECK(v == 0.0);
  ScalarField plus = a;
  for (double& v : plus.values()) v += 0.7;
  for (double v : difference_map(a, plus).values()) CHECK(v == doctest::Approx(-0.7).epsilon(1e-12));
  const ScalarField d = difference_map(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(d[i] == a[i] - b[i]);
  CHECK_THROWS_AS(difference_map(a, ScalarField(Grid2D(5, 5))), GridMismatch);
}
