#include "mocomp/hyperelastic.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace mocomp {

void OgdenParams::validate() const {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw InvalidParameter("Ogden weights a1, a2 must be positive");
}

double w_op(const Mat2& F, const OgdenParams& p) noexcept {
  const double d = F.det();
  if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
  const double n2 = F.frobenius2();
  const double q = d - 1.0 / d;
  const double q2 = q * q;
  return p.a1 * n2 * n2 + p.a2 * q2 * q2;
}

double gamma_prime(double delta) {
  if (!(delta > 0.0)) throw DomainError("gamma_prime: determinant must be positive");
  const double q = delta - 1.0 / delta;
  const double c0 = q * q * q;
  const double c1 = 1.0 + 1.0 / (delta * delta);
  return 4.0 * c0 * c1;
}

Mat2 w_op_gradient(const Mat2& F, const OgdenParams& p) noexcept {
  const double d = F.det();
  const double q = d - 1.0 / d;
  const double c0 = q * q * q;
  const double c1 = 1.0 + 1.0 / (d * d);
  return (4.0 * p.a1 * F.frobenius2()) * F + (4.0 * p.a2 * c0 * c1) * F.cofactor();
}

TensorField update_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma1,
                     double dt) {
  require_same_grid(v.grid(), z.grid(), "update_v");
  const TensorField dz = displacement_gradient(z);
  TensorField out(v.grid());
  const double damp = 1.0 / (1.0 + dt * gamma1);
  const std::size_t n = v.size();
  std::atomic<std::size_t> bad{n};
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2 F = Mat2::identity() + v[i];
    const Mat2 next = damp * (v[i] + dt * (gamma1 * dz[i] - w_op_gradient(F, p)));
    out[i] = next;
    const bool finite = std::isfinite(next.a11) && std::isfinite(next.a12) && std::isfinite(next.a21) &&
                        std::isfinite(next.a22);
    if (!finite || !((Mat2::identity() + next).det() > 0.0)) {
      std::size_t cur = bad.load();
      while (i < cur && !bad.compare_exchange_weak(cur, i)) {
      }
    }
  }
  if (bad.load() < n) throw StepDiverged("update_v: step left the admissible set", bad.load());
  return out;
}

TensorField descend_v(const TensorField& v, const DisplacementField& z, const OgdenParams& p, double gamma1,
                      double dt, int max_halvings) {
  require_same_grid(v.grid(), z.grid(), "descend_v");
  const TensorField dz = displacement_gradient(z);
  TensorField out(v.grid());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto local = [&](const Mat2& m) { return w_op(Mat2::identity() + m, p) + 0.5 * gamma1 * (m - dz[i]).frobenius2(); };
    const double before = local(v[i]);
    const Mat2 grad = w_op_gradient(Mat2::identity() + v[i], p);
    out[i] = v[i];
    double h = dt;
    for (int m = 0; m <= max_halvings; ++m, h *= 0.5) {
      const Mat2 next = (1.0 / (1.0 + h * gamma1)) * (v[i] + h * (gamma1 * dz[i] - grad));
      // w_op is +inf where det <= 0 or the step produced NaN.
      const double after = local(next);
      if (std::isfinite(after) && after <= before) {
        out[i] = next;
        break;
      }
    }
  }
  return out;
}

double hyperelastic_energy(const TensorField& v, const OgdenParams& p) {
  double s = 0.0;
  for (const Mat2& m : v.values()) s += w_op(Mat2::identity() + m, p);
  return s;
}

}  // namespace mocomp
