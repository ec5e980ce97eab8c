#pragma once

// MRI forward operator: the unitary 2D DFT of a real image, and its adjoint,
// the real part of the unitary inverse DFT. Full Cartesian sampling.

#include <vector>

#include "mocomp/fields.hpp"

namespace mocomp {

/// T >= 1 k-space acquisitions on one grid.
class KSpaceStack {
 public:
  KSpaceStack() = default;
  explicit KSpaceStack(std::vector<ComplexField> acquisitions);

  std::size_t count() const noexcept { return acquisitions_.size(); }
  const Grid2D& grid() const { return acquisitions_.front().grid(); }
  const ComplexField& operator[](std::size_t i) const { return acquisitions_[i]; }
  const std::vector<ComplexField>& acquisitions() const noexcept { return acquisitions_; }

 private:
  std::vector<ComplexField> acquisitions_;
};

ComplexField forward(const ScalarField& u);
ScalarField adjoint(const ComplexField& x);

/// Squared l2 norm of k-space data.
double norm2(const ComplexField& x);
/// Re <a, b>.
double real_dot(const ComplexField& a, const ComplexField& b);

}  // namespace mocomp
