#include "mocomp/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mocomp {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string energy_csv(const std::vector<EnergyRecord>& log) {
  std::ostringstream os;
  os << "level,iter,total,hyperelastic,coupling,fidelity,registration,tv";
  const std::size_t t = log.empty() ? 0 : log.front().min_det.size();
  for (std::size_t i = 0; i < t; ++i) os << ",min_det_" << i;
  for (std::size_t i = 0; i < t; ++i) os << ",regrids_" << i;
  os << "\n";
  for (const EnergyRecord& r : log) {
    const EnergyTerms& e = r.terms;
    os << r.level << "," << r.iter << "," << format_number(e.total()) << "," << format_number(e.hyperelastic) << ","
       << format_number(e.coupling) << "," << format_number(e.fidelity) << "," << format_number(e.registration)
       << "," << format_number(e.tv);
    for (double d : r.min_det) os << "," << format_number(d);
    for (int g : r.regrids) os << "," << g;
    os << "\n";
  }
  return os.str();
}

std::string frames_csv(const std::vector<FrameEvaluation>& rows) {
  std::ostringstream os;
  os << "frame,mi_before,mi_after,epe_mean,epe_max,min_det,regrids\n";
  for (const FrameEvaluation& r : rows) {
    os << r.frame << "," << format_number(r.mi_before) << "," << format_number(r.mi_after) << ","
       << format_number(r.epe_mean) << "," << format_number(r.epe_max) << "," << format_number(r.min_det) << ","
       << r.regrids << "\n";
  }
  return os.str();
}

}  // namespace mocomp
