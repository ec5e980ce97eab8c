#include "mocomp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "mocomp/pyramid.hpp"
#include "mocomp/wtv.hpp"

namespace mocomp {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be positive");
  };
  positive(a1, "a1");
  positive(a2, "a2");
  positive(gamma1, "gamma1");
  positive(gamma2, "gamma2");
  positive(gamma3, "gamma3");
  positive(theta, "theta");
  positive(sigma, "sigma");
  positive(dt_v, "dt_v");
  positive(dt_phi, "dt_phi");
  positive(det_floor, "det_floor");
  positive(inverse_tol, "inverse_tol");
  if (!(delta_t > 0.0 && delta_t <= 0.125)) throw InvalidParameter("delta_t must lie in (0, 1/8]");
  if (!(g_floor > 0.0 && g_floor < 1.0)) throw InvalidParameter("g_floor must lie in (0, 1)");
  if (k_outer < 1 || n_inner < 1 || n_chambolle < 1) throw InvalidParameter("iteration counts must be >= 1");
  if (pyramid_levels < 1) throw InvalidParameter("pyramid_levels must be >= 1");
  if (max_halvings < 0) throw InvalidParameter("max_halvings must be >= 0");
  if (inverse_max_iter < 1) throw InvalidParameter("inverse_max_iter must be >= 1");
  if (u_cg_iter < 0) throw InvalidParameter("u_cg_iter must be >= 0");
  if (max_force_step < 0.0) throw InvalidParameter("max_force_step must be >= 0");
}

EnergyTerms& EnergyTerms::operator+=(const EnergyTerms& o) noexcept {
  hyperelastic += o.hyperelastic;
  coupling += o.coupling;
  fidelity += o.fidelity;
  registration += o.registration;
  tv += o.tv;
  return *this;
}

namespace {

EnergyTerms acquisition_energy(const AcquisitionState& a, const ScalarField& u, const ComplexField& x,
                               const SolverConfig& cfg) {
  EnergyTerms e;
  const OgdenParams ogden = cfg.ogden();
  e.hyperelastic = hyperelastic_energy(a.v, ogden);

  const TensorField dz = displacement_gradient(a.phi.z);
  double c = 0.0;
  for (std::size_t i = 0; i < dz.size(); ++i) c += (a.v[i] - dz[i]).frobenius2();
  e.coupling = 0.5 * cfg.gamma1 * c;

  ComplexField r = forward(a.w);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= x[i];
  e.fidelity = 0.5 * cfg.gamma3 * norm2(r);

  const ScalarField u_inv = warp(u, a.z_inv);
  const ScalarField det_inv = jacobian_determinant(a.z_inv);
  double reg = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = a.w[i] - u_inv[i];
    reg += d * d * std::max(det_inv[i], 0.0);
  }
  e.registration = 0.5 * cfg.gamma2 * reg;

  e.tv = prox_objective(a.f, a.w, a.g.g, cfg.theta);
  return e;
}

}  // namespace

EnergyTerms energy(const JointState& state, const KSpaceStack& data, const SolverConfig& cfg) {
  if (state.acq.size() != data.count()) throw InvalidParameter("energy: state and data sizes differ");
  EnergyTerms total;
  for (std::size_t i = 0; i < state.acq.size(); ++i) total += acquisition_energy(state.acq[i], state.u, data[i], cfg);
  const double inv_t = 1.0 / static_cast<double>(state.acq.size());
  total.hyperelastic *= inv_t;
  total.coupling *= inv_t;
  total.fidelity *= inv_t;
  total.registration *= inv_t;
  total.tv *= inv_t;
  return total;
}

ScalarField update_w(const ScalarField& u, const DisplacementField& z_inv, const ScalarField& det_inv,
                     const ScalarField& f, const ComplexField& x, double gamma2, double gamma3, double inv_theta) {
  require_same_grid(u.grid(), z_inv.grid(), "update_w");
  require_same_grid(u.grid(), det_inv.grid(), "update_w");
  require_same_grid(u.grid(), f.grid(), "update_w");
  require_same_grid(u.grid(), x.grid(), "update_w");
  const ScalarField u_inv = warp(u, z_inv);
  const ScalarField data = adjoint(x);
  ScalarField w(u.grid());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double k = gamma2 * det_inv[i];
    w[i] = (k * u_inv[i] + f[i] * inv_theta + gamma3 * data[i]) / (k + gamma3 + inv_theta);
  }
  return w;
}

ScalarField update_w(const ScalarField& u, const DisplacementField& z_inv, const ScalarField& det_inv,
                     const ScalarField& f, const ComplexField& x, const SolverConfig& cfg) {
  return update_w(u, z_inv, det_inv, f, x, cfg.gamma2, cfg.gamma3, 1.0 / cfg.theta);
}

ScalarField update_u(const std::vector<ScalarField>& w, const std::vector<DisplacementField>& z) {
  if (w.empty() || w.size() != z.size()) throw InvalidParameter("update_u: need matching, non-empty w and z lists");
  ScalarField u(w.front().grid());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const ScalarField warped = warp(w[i], z[i]);
    for (std::size_t p = 0; p < u.size(); ++p) u[p] += warped[p];
  }
  const double inv_t = 1.0 / static_cast<double>(w.size());
  for (double& v : u.values()) v *= inv_t;
  return u;
}

LeastSquaresU update_u_least_squares(const std::vector<ScalarField>& w, const std::vector<DisplacementField>& z_inv,
                                     const std::vector<ScalarField>& det_inv, const ScalarField& u0, int max_iter,
                                     double tol) {
  if (w.empty() || w.size() != z_inv.size() || w.size() != det_inv.size()) {
    throw InvalidParameter("update_u_least_squares: need matching, non-empty lists");
  }
  if (max_iter < 0) throw InvalidParameter("update_u_least_squares: max_iter must be >= 0");
  for (std::size_t i = 0; i < w.size(); ++i) {
    require_same_grid(u0.grid(), w[i].grid(), "update_u_least_squares");
    require_same_grid(u0.grid(), z_inv[i].grid(), "update_u_least_squares");
    require_same_grid(u0.grid(), det_inv[i].grid(), "update_u_least_squares");
  }
  // Normal operator N u = sum_i W_i^T D_i W_i u and right-hand side sum_i W_i^T D_i w_i.
  auto weighted = [&](std::size_t i, ScalarField r) {
    for (std::size_t p = 0; p < r.size(); ++p) r[p] *= std::max(det_inv[i][p], 0.0);
    return warp_adjoint(r, z_inv[i]);
  };
  auto normal = [&](const ScalarField& x) {
    ScalarField acc(x.grid());
    for (std::size_t i = 0; i < w.size(); ++i) acc = axpby(1.0, acc, 1.0, weighted(i, warp(x, z_inv[i])));
    return acc;
  };
  ScalarField b(u0.grid());
  for (std::size_t i = 0; i < w.size(); ++i) b = axpby(1.0, b, 1.0, weighted(i, w[i]));

  LeastSquaresU out{u0, 0, 0.0};
  ScalarField r = axpby(1.0, b, -1.0, normal(out.u));
  ScalarField p = r;
  double rr = dot(r, r);
  const double bb = dot(b, b);
  const double stop = tol * tol * std::max(bb, 1e-300);
  out.relative_residual = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
  for (int it = 0; it < max_iter && rr > stop; ++it) {
    const ScalarField np = normal(p);
    const double pnp = dot(p, np);
    if (!(pnp > 0.0)) break;
    const double alpha = rr / pnp;
    out.u = axpby(1.0, out.u, alpha, p);
    r = axpby(1.0, r, -alpha, np);
    const double rr_next = dot(r, r);
    p = axpby(1.0, r, rr_next / rr, p);
    rr = rr_next;
    out.iterations = it + 1;
    out.relative_residual = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
  }
  return out;
}

ScalarField euclidean_mean(const KSpaceStack& data) {
  ScalarField m(data.grid());
  for (const auto& x : data.acquisitions()) {
    const ScalarField a = adjoint(x);
    for (std::size_t p = 0; p < m.size(); ++p) m[p] += a[p];
  }
  const double inv_t = 1.0 / static_cast<double>(data.count());
  for (double& v : m.values()) v *= inv_t;
  return m;
}

namespace {

struct LevelData {
  KSpaceStack data;
  std::vector<ScalarField> images;  // A* x_i at this level
};

LevelData make_level(const KSpaceStack& full, const std::vector<ScalarField>& full_images, int factor) {
  LevelData level;
  if (factor == 1) {
    level.data = full;
    level.images = full_images;
    return level;
  }
  std::vector<ComplexField> xs;
  for (const auto& img : full_images) {
    level.images.push_back(downsample_box(img, factor));
    xs.push_back(forward(level.images.back()));
  }
  level.data = KSpaceStack(std::move(xs));
  // A* A is the identity on real images, so keep the exact round trip.
  for (std::size_t i = 0; i < level.images.size(); ++i) level.images[i] = adjoint(level.data[i]);
  return level;
}

// Retries `step` with a halved time step on StepDiverged.
template <typename Step>
auto with_halving(double& dt, int max_halvings, Step&& step) {
  for (int halvings = 0;; ++halvings) {
    try {
      return step(dt);
    } catch (const StepDiverged&) {
      if (halvings >= max_halvings) throw;
      dt *= 0.5;
    }
  }
}

void inner_loop(AcquisitionState& a, const ScalarField& u, const SolverConfig& cfg) {
  const OgdenParams ogden = cfg.ogden();
  // The current z is relative to the saved history; register w o phi_saved.
  ScalarField w_work = a.phi.saved.empty() ? a.w : warp(a.w, [&] {
    DeformationState history = a.phi;
    history.z = DisplacementField(a.phi.z.grid());
    return history.total();
  }());

  const DisplacementField identity(a.phi.z.grid());
  for (int n = 0; n < cfg.n_inner; ++n) {
    TensorField v = descend_v(a.v, a.phi.z, ogden, cfg.gamma1, a.dt_v);
    const bool fresh = a.phi.z == identity;
    DisplacementField z = with_halving(a.dt_phi, cfg.max_halvings, [&](double dt) {
      FlowParams fp = cfg.flow();
      fp.dt = dt;
      PhiStep step = update_phi_step(a.phi.z, v, w_work, u, fp);
      for (std::size_t i = 0; i < step.z.size(); ++i) {
        if (!std::isfinite(step.z[i].x) || !std::isfinite(step.z[i].y)) {
          throw StepDiverged("update_phi: non-finite displacement", i);
        }
      }
      // Regridding cannot help a single step from the identity.
      if (fresh && min_value(jacobian_determinant(step.z)) < cfg.det_floor) {
        throw StepDiverged("update_phi: one step from the identity leaves the admissible set", 0);
      }
      return std::move(step.z);
    });
    if (min_value(jacobian_determinant(z)) < cfg.det_floor) {
      // Keep the last admissible iterate as the saved piece and restart from
      // the identity; the rejected step is dropped.
      RegridResult rg = regrid(std::move(a.phi), std::move(a.v), std::move(w_work));
      a.phi = std::move(rg.state);
      a.v = std::move(rg.v);
      w_work = std::move(rg.w);
      continue;
    }
    a.v = std::move(v);
    a.phi.z = std::move(z);
  }
}

// Sub-problems 3 and 4 for the current deformation.
void refresh_images(AcquisitionState& a, const ScalarField& u, const ComplexField& x, const SolverConfig& cfg) {
  const ScalarField det_inv = jacobian_determinant(a.z_inv);
  a.w = update_w(u, a.z_inv, det_inv, a.f, x, cfg);
  a.f = prox_wtv(a.w, a.g, cfg.theta, cfg.n_chambolle, cfg.delta_t);
}

double min_det_of(const AcquisitionState& a) { return min_value(jacobian_determinant(a.phi.total())); }

EnergyRecord make_record(const JointState& s, const KSpaceStack& data, const SolverConfig& cfg, int level,
                         int iter) {
  EnergyRecord r{level, iter, energy(s, data, cfg), {}, {}};
  for (const auto& a : s.acq) {
    r.min_det.push_back(min_det_of(a));
    r.regrids.push_back(a.phi.regrid_count);
  }
  return r;
}

std::string describe(const EnergyRecord& prev, const EnergyRecord& cur) {
  std::ostringstream os;
  os << "level " << cur.level << " iter " << cur.iter << ": total " << prev.terms.total() << " -> "
     << cur.terms.total() << " (hyperelastic " << prev.terms.hyperelastic << " -> " << cur.terms.hyperelastic
     << ", coupling " << prev.terms.coupling << " -> " << cur.terms.coupling << ", fidelity "
     << prev.terms.fidelity << " -> " << cur.terms.fidelity << ", registration " << prev.terms.registration
     << " -> " << cur.terms.registration << ", tv " << prev.terms.tv << " -> " << cur.terms.tv << ")";
  return os.str();
}

}  // namespace

SolveResult solve(const KSpaceStack& acquisitions, const SolverConfig& cfg,
                  const std::optional<ScalarField>& initial_u, const SolveObserver& observer) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t count = acquisitions.count();
  if (count == 0) throw InvalidParameter("solve: no acquisitions");
  if (cfg.reference_index < 0 || static_cast<std::size_t>(cfg.reference_index) >= count) {
    throw InvalidParameter("solve: reference_index out of range");
  }
  const Grid2D fine = acquisitions.grid();
  if (initial_u) require_same_grid(initial_u->grid(), fine, "solve initial_u");

  std::vector<ScalarField> full_images;
  for (const auto& x : acquisitions.acquisitions()) full_images.push_back(adjoint(x));

  const int levels = usable_levels(fine, cfg.pyramid_levels);
  SolveResult result;
  JointState& s = result.state;
  s.acq.resize(count);
  for (auto& a : s.acq) {
    a.dt_v = cfg.dt_v;
    a.dt_phi = cfg.dt_phi;
  }

  for (int level = 0; level < levels; ++level) {
    const int factor = 1 << (levels - 1 - level);
    LevelData ld = make_level(acquisitions, full_images, factor);
    const Grid2D grid = ld.data.grid();
    const double sigma = std::max(0.5, cfg.sigma / factor);

    // Image variables restart from the data of this level; only the
    // deformation is carried over from the coarser grid.
    if (initial_u) {
      s.u = factor == 1 ? *initial_u : downsample_box(*initial_u, factor);
    } else if (cfg.init == InitMode::kMean) {
      s.u = euclidean_mean(ld.data);
    } else {
      s.u = ld.images[cfg.reference_index];
    }
    for (std::size_t i = 0; i < count; ++i) {
      AcquisitionState& a = s.acq[i];
      const DisplacementField z =
          level == 0 || cfg.freeze_motion ? DisplacementField(grid) : upsample_displacement(a.phi.total(), grid);
      const int regrids = a.phi.regrid_count;
      a.phi = DeformationState(grid);
      a.phi.regrid_count = regrids;
      if (level > 0 && !cfg.freeze_motion && min_value(jacobian_determinant(z)) < cfg.det_floor) {
        // Interpolation pushed the carried-over map out of the admissible
        // set; keep it as history and restart the flow from the identity.
        a.phi.saved.push_back(z);
        ++a.phi.regrid_count;
        a.v = TensorField(grid);
      } else {
        a.phi.z = z;
        a.v = displacement_gradient(z);
      }
      a.w = ld.images[i];
      a.f = a.w;
      a.g = weight_map_from_image(ld.images[i], sigma, std::nullopt, cfg.g_floor);
      a.z_inv = invert(z, cfg.inverse_tol, cfg.inverse_max_iter).z_inv;
    }

    auto log_record = [&](int iter) {
      EnergyRecord rec = make_record(s, ld.data, cfg, level, iter);
      if (!s.energy_log.empty() && s.energy_log.back().level == level) {
        const EnergyRecord& prev = s.energy_log.back();
        if (rec.terms.total() > prev.terms.total() * (1.0 + kDescentTolerance)) {
          result.report.descent_violations.push_back(describe(prev, rec));
        }
      }
      if (observer) observer(rec);
      s.energy_log.push_back(std::move(rec));
    };
    log_record(0);

    for (int k = 1; k <= cfg.k_outer; ++k) {
      std::vector<std::exception_ptr> errors(count);
      std::vector<int> rejected(count, 0);
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < count; ++i) {
        try {
          AcquisitionState& a = s.acq[i];
          const double before = acquisition_energy(a, s.u, ld.data[i], cfg).total();
          const AcquisitionState saved = a;
          if (!cfg.freeze_motion) inner_loop(a, s.u, cfg);
          a.z_inv = invert(a.phi.total(), cfg.inverse_tol, cfg.inverse_max_iter).z_inv;
          refresh_images(a, s.u, ld.data[i], cfg);
          if (!cfg.freeze_motion && acquisition_energy(a, s.u, ld.data[i], cfg).total() > before) {
            // The deformation step did not pay off: keep the previous
            // deformation and only refresh the image variables.
            const double dt_v = a.dt_v, dt_phi = a.dt_phi;
            a = saved;
            a.dt_v = dt_v;
            a.dt_phi = dt_phi;
            refresh_images(a, s.u, ld.data[i], cfg);
            rejected[i] = 1;
          }
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (std::size_t i = 0; i < count; ++i) result.report.rejected_steps += rejected[i];

      std::vector<ScalarField> ws;
      std::vector<DisplacementField> totals, inverses;
      std::vector<ScalarField> dets;
      for (const auto& a : s.acq) {
        ws.push_back(a.w);
        totals.push_back(a.phi.total());
        inverses.push_back(a.z_inv);
        dets.push_back(jacobian_determinant(a.z_inv));
      }
      if (cfg.u_update == UUpdate::kLeastSquares) {
        s.u = update_u_least_squares(ws, inverses, dets, s.u, cfg.u_cg_iter).u;
      } else {
        s.u = update_u(ws, totals);
      }
      log_record(k);
    }
    result.data = std::move(ld.data);
  }

  SolveReport& rep = result.report;
  rep.energy_log = s.energy_log;
  rep.levels = levels;
  for (const auto& a : s.acq) {
    rep.regrid_counts.push_back(a.phi.regrid_count);
    rep.min_det.push_back(min_det_of(a));
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace mocomp
