#pragma once

// CSV text for the energy log and the per-frame evaluation table. Numbers
// are printed with 17 significant digits so identical runs give identical
// bytes.

#include <string>
#include <vector>

#include "mocomp/solver.hpp"

namespace mocomp {

/// One row per (level, outer iteration): the five energy terms and their
/// total, then min det and regrid count for every acquisition.
std::string energy_csv(const std::vector<EnergyRecord>& log);

struct FrameEvaluation {
  int frame = 0;
  double mi_before = 0.0;  ///< MI(u0, adjoint(x_i))
  double mi_after = 0.0;   ///< MI(u, w_i o phi_i)
  double epe_mean = 0.0;
  double epe_max = 0.0;
  double min_det = 0.0;
  int regrids = 0;
};

std::string frames_csv(const std::vector<FrameEvaluation>& rows);

/// Shortest text that reads back as the same double; "inf"/"-inf"/"nan" otherwise.
std::string format_number(double v);

}  // namespace mocomp
