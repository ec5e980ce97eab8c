#pragma once

// Joint reconstruction / registration by alternating minimization over
// (v_i, phi_i, w_i, f_i, u) of
//
//   1/T sum_i [ sum_x W(I + v_i) + gamma1/2 |v_i - grad z_i|^2
//             + gamma3/2 |A w_i - x_i|^2
//             + gamma2/2 |(w_i - u o phi_i^-1) sqrt(det grad phi_i^-1)|^2
//             + 1/(2 theta) |f_i - w_i|^2 + TV_{g_i}(f_i) ]
//
// solved coarse to fine for the deformation variables.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mocomp/deformation.hpp"
#include "mocomp/edge_weights.hpp"
#include "mocomp/fields.hpp"
#include "mocomp/fourier.hpp"
#include "mocomp/hyperelastic.hpp"

namespace mocomp {

enum class InitMode { kReference, kMean };
enum class UUpdate { kLeastSquares, kAverage };

struct SolverConfig {
  // Model weights.
  double a1 = 1.0;
  double a2 = 50.0;
  double gamma1 = 5.0;
  double gamma2 = 1e5;
  double gamma3 = 30.0;
  double theta = 5.0;
  double sigma = 2.0;

  // Iteration counts.
  int k_outer = 2;
  int n_inner = 500;
  int n_chambolle = 500;
  int pyramid_levels = 3;

  // Step sizes and safeguards.
  double dt_v = 1e-3;
  double dt_phi = 0.3;
  double delta_t = 0.125;
  double max_force_step = 0.25;
  int max_halvings = 3;
  double det_floor = 0.05;
  double g_floor = 0.01;
  double inverse_tol = 1e-3;
  int inverse_max_iter = 50;

  int reference_index = 0;
  InitMode init = InitMode::kReference;
  UUpdate u_update = UUpdate::kLeastSquares;
  int u_cg_iter = 50;
  /// Keep every deformation at the identity (skips the v and phi updates).
  bool freeze_motion = false;

  OgdenParams ogden() const { return {a1, a2}; }
  FlowParams flow() const { return {gamma1, gamma2, dt_phi, max_force_step}; }
  void validate() const;
};

struct EnergyTerms {
  double hyperelastic = 0.0;  ///< sum_x W(I + v)
  double coupling = 0.0;      ///< gamma1/2 |v - grad z|^2
  double fidelity = 0.0;      ///< gamma3/2 |A w - x|^2
  double registration = 0.0;  ///< gamma2/2 |(w - u o phi^-1) sqrt(det)|^2
  double tv = 0.0;            ///< 1/(2 theta)|f - w|^2 + TV_g(f)

  double total() const noexcept { return hyperelastic + coupling + fidelity + registration + tv; }
  EnergyTerms& operator+=(const EnergyTerms& o) noexcept;
};

struct EnergyRecord {
  int level = 0;
  int iter = 0;
  EnergyTerms terms;
  std::vector<double> min_det;
  std::vector<int> regrids;
};

/// Everything the solver carries for one acquisition.
struct AcquisitionState {
  DeformationState phi;
  TensorField v;
  ScalarField w;
  ScalarField f;
  WeightMap g;
  /// Displacement of phi^-1 for the current total deformation.
  DisplacementField z_inv;
  double dt_v = 1e-3;
  double dt_phi = 0.3;
};

struct JointState {
  ScalarField u;
  std::vector<AcquisitionState> acq;
  std::vector<EnergyRecord> energy_log;
};

struct SolveReport {
  std::vector<EnergyRecord> energy_log;
  std::vector<int> regrid_counts;
  std::vector<double> min_det;
  /// Outer steps whose total energy rose by more than the tolerance.
  std::vector<std::string> descent_violations;
  /// Deformation updates discarded because they raised the energy.
  int rejected_steps = 0;
  double wall_seconds = 0.0;
  int levels = 0;
};

struct SolveResult {
  JointState state;
  SolveReport report;
  /// Level data the final state refers to (the finest level).
  KSpaceStack data;
};

/// Per-term energy averaged over acquisitions; `data` must match the grid of `state`.
EnergyTerms energy(const JointState& state, const KSpaceStack& data, const SolverConfig& cfg);

/// Pointwise minimizer of the three quadratic terms in w (A unitary):
///   w = (gamma2 det_inv (u o phi^-1) + f/theta + gamma3 A*x) / (gamma2 det_inv + gamma3 + 1/theta)
ScalarField update_w(const ScalarField& u, const DisplacementField& z_inv, const ScalarField& det_inv,
                     const ScalarField& f, const ComplexField& x, double gamma2, double gamma3, double inv_theta);
ScalarField update_w(const ScalarField& u, const DisplacementField& z_inv, const ScalarField& det_inv,
                     const ScalarField& f, const ComplexField& x, const SolverConfig& cfg);

/// u = 1/T sum_i w_i o phi_i.
ScalarField update_u(const std::vector<ScalarField>& w, const std::vector<DisplacementField>& z);

/// Minimizer over u of sum_i |(w_i - u o phi_i^-1) sqrt(det_i)|^2 with the
/// bilinear warp as the discrete composition, by conjugate gradients on the
/// normal equations started from `u0`. Where the warps leave u undetermined
/// the start value is kept.
struct LeastSquaresU {
  ScalarField u;
  int iterations = 0;
  double relative_residual = 0.0;
};
LeastSquaresU update_u_least_squares(const std::vector<ScalarField>& w, const std::vector<DisplacementField>& z_inv,
                                     const std::vector<ScalarField>& det_inv, const ScalarField& u0, int max_iter,
                                     double tol = 1e-10);

/// Uncorrected baseline: 1/T sum_i A* x_i.
ScalarField euclidean_mean(const KSpaceStack& data);

/// Relative per-step tolerance of the energy-descent check.
inline constexpr double kDescentTolerance = 5e-3;

using SolveObserver = std::function<void(const EnergyRecord&)>;

SolveResult solve(const KSpaceStack& acquisitions, const SolverConfig& cfg,
                  const std::optional<ScalarField>& initial_u = std::nullopt, const SolveObserver& observer = {});

}  // namespace mocomp
