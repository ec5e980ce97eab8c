// mocomp: simulate | reconstruct | evaluate | export-maps
//
// Exit codes: 0 ok, 2 configuration error, 3 data error, 4 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mocomp/config.hpp"
#include "mocomp/deformation.hpp"
#include "mocomp/io.hpp"
#include "mocomp/metrics.hpp"
#include "mocomp/phantom.hpp"
#include "mocomp/render.hpp"
#include "mocomp/report.hpp"
#include "mocomp/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mocomp;

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kSolver = 4 };

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::string recon;
  std::optional<std::uint64_t> seed;
  std::optional<int> levels;
  bool quiet = false;
};

// Failures are sorted into exit codes by the stage that raised them.
struct StageError : std::runtime_error {
  StageError(Exit code, const std::string& what) : std::runtime_error(what), code(code) {}
  Exit code;
};

std::string frame_name(const char* stem, std::size_t i, const char* ext) {
  return std::string(stem) + "_" + std::to_string(i) + ext;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw DataError("cannot write " + path.string());
}

void write_manifest(const fs::path& dir, const json& j) { write_text(dir / "manifest.json", j.dump(2) + "\n"); }

struct Manifest {
  fs::path dir;
  json j;

  fs::path file(const std::string& key) const { return dir / j.at(key).get<std::string>(); }
  fs::path file(const std::string& key, std::size_t i) const { return dir / j.at(key).at(i).get<std::string>(); }
  std::size_t frames() const { return j.at("frames").get<std::size_t>(); }
  std::string kind() const { return j.at("kind").get<std::string>(); }
};

Manifest read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read manifest " + path.string());
  Manifest m{path.parent_path(), {}};
  try {
    is >> m.j;
    m.kind();
    m.frames();
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
  return m;
}

RunConfig load_run_config(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.phantom.seed = *o.seed;
  if (o.levels) {
    cfg.solver.pyramid_levels = *o.levels;
    try {
      cfg.solver.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string("--levels: ") + e.what());
    }
  }
  return cfg;
}

KSpaceStack read_stack(const Manifest& m) {
  std::vector<ComplexField> xs;
  try {
    for (std::size_t i = 0; i < m.frames(); ++i) xs.push_back(io::read_complex(m.file("kspace", i)));
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest lists no k-space files: ") + e.what());
  }
  if (xs.empty()) throw DataError("dataset has no frames");
  for (const auto& x : xs)
    if (!(x.grid() == xs.front().grid())) throw DataError("k-space frames have different grids");
  return KSpaceStack(std::move(xs));
}

// ----------------------------------------------------------------------------

int cmd_simulate(const Options& o) {
  const RunConfig cfg = load_run_config(o);
  PhantomData d;
  try {
    d = generate(cfg.phantom);
  } catch (const InvariantViolation& e) {
    throw ConfigError(e.what());
  }
  const fs::path out(o.out);
  fs::create_directories(out);

  json j;
  j["kind"] = "dataset";
  j["width"] = cfg.phantom.width;
  j["height"] = cfg.phantom.height;
  j["frames"] = cfg.phantom.frames;
  j["seed"] = cfg.phantom.seed;
  j["config"] = format_config(cfg);
  j["truth"] = "truth.f64";
  io::write_scalar(out / "truth.f64", d.truth);
  io::write_pgm(out / "truth.pgm", d.truth);
  for (std::size_t i = 0; i < d.z_true.size(); ++i) {
    j["z_true"].push_back(frame_name("z_true", i, ".disp"));
    j["kspace"].push_back(frame_name("kspace", i, ".c64"));
    io::write_displacement(out / j["z_true"].back().get<std::string>(), d.z_true[i]);
    io::write_complex(out / j["kspace"].back().get<std::string>(), d.acquisitions[i]);
  }
  write_manifest(out, j);
  if (!o.quiet) std::cerr << "simulate: wrote " << d.z_true.size() << " frames to " << out << "\n";
  return kOk;
}

// Inspection images for a reconstruction directory.
void export_maps(const fs::path& out, const ScalarField& u, const ScalarField& mean,
                 const std::vector<ScalarField>& w, const std::vector<DisplacementField>& z) {
  // u and the baseline share one intensity window so they can be compared.
  const double lo = std::min(min_value(u), min_value(mean)), hi = std::max(max_value(u), max_value(mean));
  io::write_pgm(out / "u.pgm", u, lo, hi);
  io::write_pgm(out / "mean.pgm", mean, lo, hi);
  for (std::size_t i = 0; i < z.size(); ++i) {
    // det in [0, 2] maps linearly onto [0, 255]: 1 is mid grey, folds are black.
    io::write_pgm(out / frame_name("det", i, ".pgm"), jacobian_determinant(z[i]), 0.0, 2.0);
    io::write_pgm(out / frame_name("grid", i, ".pgm"), deformation_grid(u, z[i]));
    io::write_pgm_symmetric(out / frame_name("diff", i, ".pgm"), difference_map(u, warp(w[i], z[i])));
  }
}

int cmd_reconstruct(const Options& o) {
  const RunConfig cfg = load_run_config(o);
  const Manifest data = read_manifest(o.data);
  const KSpaceStack stack = read_stack(data);
  const fs::path out(o.out);
  fs::create_directories(out);

  std::vector<EnergyRecord> log;
  SolveResult r;
  try {
    r = solve(stack, cfg.solver, std::nullopt, [&](const EnergyRecord& rec) {
      log.push_back(rec);
      if (!o.quiet) {
        std::fprintf(stderr, "level %d iter %d energy %.6g\n", rec.level, rec.iter, rec.terms.total());
      }
    });
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  } catch (const Error& e) {
    write_text(out / "energy.csv", energy_csv(log));
    throw StageError(kSolver, std::string("solver failed: ") + e.what() + " (energy log up to the failure in " +
                                  (out / "energy.csv").string() + ")");
  }

  const JointState& s = r.state;
  const ScalarField mean = euclidean_mean(stack);
  json j;
  j["kind"] = "reconstruction";
  j["width"] = stack.grid().width;
  j["height"] = stack.grid().height;
  j["frames"] = stack.count();
  j["config"] = format_config(cfg);
  j["data"] = fs::absolute(o.data).lexically_normal().string();
  j["u"] = "u.f64";
  j["mean"] = "mean.f64";
  j["u0"] = "u0.f64";
  j["energy"] = "energy.csv";
  io::write_scalar(out / "u.f64", s.u);
  io::write_scalar(out / "mean.f64", mean);
  io::write_scalar(out / "u0.f64", adjoint(stack[cfg.solver.reference_index]));

  std::vector<ScalarField> ws;
  std::vector<DisplacementField> zs;
  for (std::size_t i = 0; i < s.acq.size(); ++i) {
    const AcquisitionState& a = s.acq[i];
    const DisplacementField z = a.phi.total();
    j["z"].push_back(frame_name("z", i, ".disp"));
    j["z_inv"].push_back(frame_name("z_inv", i, ".disp"));
    j["w"].push_back(frame_name("w", i, ".f64"));
    j["det"].push_back(frame_name("det", i, ".f64"));
    io::write_displacement(out / j["z"].back().get<std::string>(), z);
    io::write_displacement(out / j["z_inv"].back().get<std::string>(), a.z_inv);
    io::write_scalar(out / j["w"].back().get<std::string>(), a.w);
    io::write_scalar(out / j["det"].back().get<std::string>(), jacobian_determinant(z));
    j["regrids"].push_back(a.phi.regrid_count);
    ws.push_back(a.w);
    zs.push_back(z);
  }
  write_text(out / "energy.csv", energy_csv(s.energy_log));
  export_maps(out, s.u, mean, ws, zs);
  write_manifest(out, j);

  // Run report: the only output that carries timing.
  json rep;
  rep["wall_seconds"] = r.report.wall_seconds;
  rep["levels"] = r.report.levels;
  rep["regrid_counts"] = r.report.regrid_counts;
  rep["min_det"] = r.report.min_det;
  rep["rejected_steps"] = r.report.rejected_steps;
  rep["descent_violations"] = r.report.descent_violations;
  write_text(out / "report.json", rep.dump(2) + "\n");

  if (!o.quiet) {
    for (const std::string& v : r.report.descent_violations) std::cerr << "descent violation: " << v << "\n";
    std::fprintf(stderr, "reconstruct: %.1f s, output in %s\n", r.report.wall_seconds, out.c_str());
  }
  return kOk;
}

// Estimated images and deformations of a manifest. A dataset manifest stands
// for the perfect reconstruction: u = truth, phi_i^-1 = phi_true,i.
struct Estimate {
  ScalarField u;
  std::vector<DisplacementField> z_inv;
  std::vector<ScalarField> registered;
  std::vector<double> min_det;
  std::vector<int> regrids;
};

Estimate read_estimate(const Manifest& m) {
  Estimate e;
  try {
    if (m.kind() == "dataset") {
      e.u = io::read_scalar(m.file("truth"));
      for (std::size_t i = 0; i < m.frames(); ++i) {
        e.z_inv.push_back(io::read_displacement(m.file("z_true", i)));
        e.registered.push_back(e.u);
        e.min_det.push_back(min_value(jacobian_determinant(e.z_inv.back())));
        e.regrids.push_back(0);
      }
    } else if (m.kind() == "reconstruction") {
      e.u = io::read_scalar(m.file("u"));
      for (std::size_t i = 0; i < m.frames(); ++i) {
        const DisplacementField z = io::read_displacement(m.file("z", i));
        e.z_inv.push_back(io::read_displacement(m.file("z_inv", i)));
        e.registered.push_back(warp(io::read_scalar(m.file("w", i)), z));
        e.min_det.push_back(min_value(jacobian_determinant(z)));
        e.regrids.push_back(m.j.at("regrids").at(i).get<int>());
      }
    } else {
      throw DataError("unknown manifest kind '" + m.kind() + "'");
    }
  } catch (const json::exception& ex) {
    throw DataError(std::string("incomplete manifest: ") + ex.what());
  } catch (const GridMismatch& ex) {
    throw DataError(ex.what());
  }
  return e;
}

int cmd_evaluate(const Options& o) {
  const Manifest truth_m = read_manifest(o.data);
  if (truth_m.kind() != "dataset") throw DataError("--data must name a dataset manifest");
  const Manifest recon_m = read_manifest(o.recon);
  if (recon_m.frames() != truth_m.frames()) throw DataError("manifests have different frame counts");

  const ScalarField truth = io::read_scalar(truth_m.file("truth"));
  const KSpaceStack stack = read_stack(truth_m);
  const Estimate est = read_estimate(recon_m);
  if (!(est.u.grid() == truth.grid()) || !(stack.grid() == truth.grid())) {
    throw DataError("grid mismatch between the manifests");
  }
  int reference = 0;
  try {
    reference = parse_config(recon_m.j.value("config", std::string())).solver.reference_index;
  } catch (const ConfigError&) {
    throw DataError("reconstruction manifest carries an unreadable config echo");
  }

  const double peak = max_value(truth);
  const ScalarField mean = euclidean_mean(stack);
  const ScalarField u0 = adjoint(stack[reference]);
  constexpr int kMargin = 7;
  std::vector<FrameEvaluation> rows;
  double epe = 0.0, min_det = std::numeric_limits<double>::infinity();
  int regrids = 0;
  for (std::size_t i = 0; i < truth_m.frames(); ++i) {
    FrameEvaluation f;
    f.frame = static_cast<int>(i);
    f.mi_before = mutual_information(u0, adjoint(stack[i]));
    f.mi_after = mutual_information(est.u, est.registered[i]);
    const EndpointError e = endpoint_error(est.z_inv[i], io::read_displacement(truth_m.file("z_true", i)), kMargin);
    f.epe_mean = e.mean;
    f.epe_max = e.max;
    f.min_det = est.min_det[i];
    f.regrids = est.regrids[i];
    epe += e.mean / truth_m.frames();
    min_det = std::min(min_det, f.min_det);
    regrids += f.regrids;
    rows.push_back(f);
  }

  const fs::path out(o.out);
  fs::create_directories(out);
  write_text(out / "frames.csv", frames_csv(rows));
  const double p_u = psnr(est.u, truth, peak), p_mean = psnr(mean, truth, peak);
  std::ostringstream summary;
  summary << "metric,value\n"
          << "psnr_u," << format_number(p_u) << "\n"
          << "psnr_mean," << format_number(p_mean) << "\n"
          << "psnr_gain," << format_number(p_u - p_mean) << "\n"
          << "epe_mean," << format_number(epe) << "\n"
          << "min_det," << format_number(min_det) << "\n"
          << "regrids," << regrids << "\n";
  write_text(out / "summary.csv", summary.str());
  if (!o.quiet) std::cout << summary.str();
  return kOk;
}

int cmd_export_maps(const Options& o) {
  const Manifest m = read_manifest(o.data);
  if (m.kind() != "reconstruction") throw DataError("export-maps needs a reconstruction manifest");
  const fs::path out(o.out);
  fs::create_directories(out);
  std::vector<ScalarField> ws;
  std::vector<DisplacementField> zs;
  try {
    for (std::size_t i = 0; i < m.frames(); ++i) {
      ws.push_back(io::read_scalar(m.file("w", i)));
      zs.push_back(io::read_displacement(m.file("z", i)));
    }
    export_maps(out, io::read_scalar(m.file("u")), io::read_scalar(m.file("mean")), ws, zs);
  } catch (const json::exception& e) {
    throw DataError(std::string("incomplete manifest: ") + e.what());
  } catch (const GridMismatch& e) {
    throw DataError(e.what());
  }
  if (!o.quiet) std::cerr << "export-maps: wrote maps to " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint motion-corrected MR reconstruction and hyperelastic registration"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress output");

  auto* sim = app.add_subcommand("simulate", "Generate a phantom dataset");
  sim->add_option("--config", o.config, "Run configuration")->required();
  sim->add_option("--out", o.out, "Output directory")->required();
  sim->add_option("--seed-override", o.seed, "Replace the phantom seed");

  auto* rec = app.add_subcommand("reconstruct", "Run the joint solver on a dataset");
  rec->add_option("--config", o.config, "Run configuration")->required();
  rec->add_option("--data", o.data, "Dataset manifest.json")->required();
  rec->add_option("--out", o.out, "Output directory")->required();
  rec->add_option("--levels", o.levels, "Override the number of pyramid levels");

  auto* ev = app.add_subcommand("evaluate", "Score a reconstruction against the ground truth");
  ev->add_option("recon", o.recon, "Reconstruction (or dataset) manifest.json")->required();
  ev->add_option("--data", o.data, "Ground-truth dataset manifest.json")->required();
  ev->add_option("--out", o.out, "Output directory")->required();

  auto* ex = app.add_subcommand("export-maps", "Render PGM maps of a reconstruction");
  ex->add_option("--data", o.data, "Reconstruction manifest.json")->required();
  ex->add_option("--out", o.out, "Output directory")->required();

  for (auto* sub : {sim, rec, ev, ex}) sub->add_flag("-q,--quiet", o.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return cmd_simulate(o);
    if (*rec) return cmd_reconstruct(o);
    if (*ev) return cmd_evaluate(o);
    return cmd_export_maps(o);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const GridMismatch& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DegenerateInput& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
}
