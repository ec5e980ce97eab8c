#include "mocomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mocomp {

double psnr(const ScalarField& a, const ScalarField& b, double peak) {
  require_same_grid(a.grid(), b.grid(), "psnr");
  if (!(peak > 0.0)) throw InvalidParameter("psnr: peak must be positive");
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) se += (a[i] - b[i]) * (a[i] - b[i]);
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

std::vector<int> bin_indices(const ScalarField& f, int bins) {
  const double lo = min_value(f), hi = max_value(f);
  if (!(hi > lo)) throw DegenerateInput("mutual information of a constant image");
  std::vector<int> idx(f.size());
  const double scale = bins / (hi - lo);
  for (std::size_t i = 0; i < f.size(); ++i) {
    idx[i] = std::min(bins - 1, static_cast<int>((f[i] - lo) * scale));
  }
  return idx;
}

}  // namespace

double mutual_information(const ScalarField& a, const ScalarField& b, int bins) {
  require_same_grid(a.grid(), b.grid(), "mutual_information");
  if (bins < 2) throw InvalidParameter("mutual_information: bins must be >= 2");
  const std::vector<int> ia = bin_indices(a, bins), ib = bin_indices(b, bins);
  std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0), pa(bins, 0.0), pb(bins, 0.0);
  const double inv_n = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[static_cast<std::size_t>(ia[i]) * bins + ib[i]] += inv_n;
    pa[ia[i]] += inv_n;
    pb[ib[i]] += inv_n;
  }
  // Terms are summed in sorted order so MI(a, b) == MI(b, a) bit for bit.
  std::vector<double> terms;
  for (int x = 0; x < bins; ++x) {
    for (int y = 0; y < bins; ++y) {
      const double p = joint[static_cast<std::size_t>(x) * bins + y];
      if (p > 0.0) terms.push_back(p * std::log(p / (pa[x] * pb[y])));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  return mi;
}

double entropy(const ScalarField& a, int bins) {
  if (bins < 2) throw InvalidParameter("entropy: bins must be >= 2");
  const std::vector<int> ia = bin_indices(a, bins);
  std::vector<double> p(bins, 0.0);
  for (int i : ia) p[i] += 1.0 / static_cast<double>(a.size());
  double h = 0.0;
  for (double q : p)
    if (q > 0.0) h -= q * std::log(q);
  return h;
}

EndpointError endpoint_error(const DisplacementField& z_est, const DisplacementField& z_true, int interior_margin) {
  require_same_grid(z_est.grid(), z_true.grid(), "endpoint_error");
  if (interior_margin < 0 || 2 * interior_margin >= std::min(z_est.width(), z_est.height())) {
    throw InvalidParameter("endpoint_error: margin leaves no interior");
  }
  EndpointError e;
  std::size_t n = 0;
  for (int y = interior_margin; y < z_est.height() - interior_margin; ++y) {
    for (int x = interior_margin; x < z_est.width() - interior_margin; ++x) {
      const Vec2 d = z_est(x, y) - z_true(x, y);
      const double err = std::hypot(d.x, d.y);
      e.mean += err;
      e.max = std::max(e.max, err);
      ++n;
    }
  }
  e.mean /= static_cast<double>(n);
  return e;
}

ScalarField difference_map(const ScalarField& u, const ScalarField& registered) {
  require_same_grid(u.grid(), registered.grid(), "difference_map");
  ScalarField d(u.grid());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = u[i] - registered[i];
  return d;
}

}  // namespace mocomp
