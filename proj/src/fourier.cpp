#include "mocomp/fourier.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fftw_plans.hpp"

namespace mocomp {

namespace detail {

fftw_plan cached_plan(PlanKind kind, int width, int height) {
  static std::mutex mutex;
  static std::map<std::tuple<PlanKind, int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(kind, width, height);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  const std::size_t n = static_cast<std::size_t>(width) * height;
  fftw_plan plan = nullptr;
  if (kind == PlanKind::kDst1) {
    auto in = alloc_real(n);
    auto out = alloc_real(n);
    plan = fftw_plan_r2r_2d(height, width, in.get(), out.get(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  } else {
    auto in = alloc_complex(n);
    auto out = alloc_complex(n);
    const int sign = kind == PlanKind::kForwardDft ? FFTW_FORWARD : FFTW_BACKWARD;
    plan = fftw_plan_dft_2d(height, width, in.get(), out.get(), sign, FFTW_ESTIMATE);
  }
  plans.emplace(key, plan);
  return plan;
}

}  // namespace detail

KSpaceStack::KSpaceStack(std::vector<ComplexField> acquisitions) : acquisitions_(std::move(acquisitions)) {
  if (acquisitions_.empty()) throw InvalidParameter("k-space stack needs at least one acquisition");
  for (const auto& a : acquisitions_) require_same_grid(a.grid(), acquisitions_.front().grid(), "k-space stack");
}

ComplexField forward(const ScalarField& u) {
  const std::size_t n = u.size();
  auto in = detail::alloc_complex(n);
  auto out = detail::alloc_complex(n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = u[i];
    in[i][1] = 0.0;
  }
  fftw_execute_dft(detail::cached_plan(detail::PlanKind::kForwardDft, u.width(), u.height()), in.get(), out.get());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexField x(u.grid());
  for (std::size_t i = 0; i < n; ++i) x[i] = {out[i][0] * scale, out[i][1] * scale};
  return x;
}

ScalarField adjoint(const ComplexField& x) {
  const std::size_t n = x.size();
  auto in = detail::alloc_complex(n);
  auto out = detail::alloc_complex(n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = x[i].real();
    in[i][1] = x[i].imag();
  }
  fftw_execute_dft(detail::cached_plan(detail::PlanKind::kBackwardDft, x.width(), x.height()), in.get(), out.get());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  ScalarField u(x.grid());
  for (std::size_t i = 0; i < n; ++i) u[i] = out[i][0] * scale;
  return u;
}

double norm2(const ComplexField& x) {
  double s = 0.0;
  for (const auto& v : x.values()) s += std::norm(v);
  return s;
}

double real_dot(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "real_dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

}  // namespace mocomp
