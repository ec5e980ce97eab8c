#pragma once

// Shared FFTW plan cache. Planning is serialized behind a mutex; execution
// uses the new-array interface on fftw_malloc'd buffers, which FFTW allows
// from any thread.

#include <fftw3.h>

#include <cstddef>
#include <memory>

namespace mocomp::detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

inline FftwBuffer<fftw_complex> alloc_complex(std::size_t n) {
  return FftwBuffer<fftw_complex>(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

inline FftwBuffer<double> alloc_real(std::size_t n) {
  return FftwBuffer<double>(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}

enum class PlanKind { kForwardDft, kBackwardDft, kDst1 };

/// Plan for a row-major array of `height` rows by `width` columns. Cached for
/// the life of the process.
fftw_plan cached_plan(PlanKind kind, int width, int height);

}  // namespace mocomp::detail
