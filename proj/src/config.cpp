#include "mocomp/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mocomp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& v, int line, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid value '" + v + "' for key '" + key + "'", line, key);
  }
  return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("invalid boolean '" + v + "' for key '" + key + "'", line, key);
}

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

template <typename T, typename Obj>
Setter number(T Obj::*member, Obj RunConfig::*section) {
  return [=](RunConfig& c, const std::string& v, int line, const std::string& key) {
    (c.*section).*member = parse_number<T>(v, line, key);
  };
}

const std::map<std::string, Setter>& phantom_keys() {
  static const std::map<std::string, Setter> keys = {
      {"width", number(&PhantomSpec::width, &RunConfig::phantom)},
      {"height", number(&PhantomSpec::height, &RunConfig::phantom)},
      {"T", number(&PhantomSpec::frames, &RunConfig::phantom)},
      {"amplitude", number(&PhantomSpec::amplitude, &RunConfig::phantom)},
      {"period", number(&PhantomSpec::period, &RunConfig::phantom)},
      {"noise_sigma", number(&PhantomSpec::noise_sigma, &RunConfig::phantom)},
      {"seed", number(&PhantomSpec::seed, &RunConfig::phantom)},
      {"min_det", number(&PhantomSpec::min_det, &RunConfig::phantom)},
      {"mode",
       [](RunConfig& c, const std::string& v, int line, const std::string& key) {
         if (v == "translation") c.phantom.mode = MotionMode::kTranslation;
         else if (v == "compression") c.phantom.mode = MotionMode::kCompression;
         else throw ConfigError("mode must be 'translation' or 'compression'", line, key);
       }},
      {"ellipse",
       [](RunConfig& c, const std::string& v, int line, const std::string& key) {
         std::istringstream is(v);
         std::string tok;
         std::vector<double> vals;
         while (is >> tok) vals.push_back(parse_number<double>(tok, line, key));
         if (vals.size() != 6) throw ConfigError("ellipse needs 6 numbers: cx cy ax ay angle intensity", line, key);
         c.phantom.ellipses.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]});
       }},
  };
  return keys;
}

const std::map<std::string, Setter>& solver_keys() {
  static const std::map<std::string, Setter> keys = {
      {"a1", number(&SolverConfig::a1, &RunConfig::solver)},
      {"a2", number(&SolverConfig::a2, &RunConfig::solver)},
      {"gamma1", number(&SolverConfig::gamma1, &RunConfig::solver)},
      {"gamma2", number(&SolverConfig::gamma2, &RunConfig::solver)},
      {"gamma3", number(&SolverConfig::gamma3, &RunConfig::solver)},
      {"theta", number(&SolverConfig::theta, &RunConfig::solver)},
      {"sigma", number(&SolverConfig::sigma, &RunConfig::solver)},
      {"k", number(&SolverConfig::k_outer, &RunConfig::solver)},
      {"N", number(&SolverConfig::n_inner, &RunConfig::solver)},
      {"n", number(&SolverConfig::n_chambolle, &RunConfig::solver)},
      {"levels", number(&SolverConfig::pyramid_levels, &RunConfig::solver)},
      {"dt_v", number(&SolverConfig::dt_v, &RunConfig::solver)},
      {"dt_phi", number(&SolverConfig::dt_phi, &RunConfig::solver)},
      {"delta_t", number(&SolverConfig::delta_t, &RunConfig::solver)},
      {"max_force_step", number(&SolverConfig::max_force_step, &RunConfig::solver)},
      {"max_halvings", number(&SolverConfig::max_halvings, &RunConfig::solver)},
      {"det_floor", number(&SolverConfig::det_floor, &RunConfig::solver)},
      {"g_floor", number(&SolverConfig::g_floor, &RunConfig::solver)},
      {"inverse_tol", number(&SolverConfig::inverse_tol, &RunConfig::solver)},
      {"inverse_max_iter", number(&SolverConfig::inverse_max_iter, &RunConfig::solver)},
      {"reference_index", number(&SolverConfig::reference_index, &RunConfig::solver)},
      {"init",
       [](RunConfig& c, const std::string& v, int line, const std::string& key) {
         if (v == "reference") c.solver.init = InitMode::kReference;
         else if (v == "mean") c.solver.init = InitMode::kMean;
         else throw ConfigError("init must be 'reference' or 'mean'", line, key);
       }},
      {"u_update",
       [](RunConfig& c, const std::string& v, int line, const std::string& key) {
         if (v == "least_squares") c.solver.u_update = UUpdate::kLeastSquares;
         else if (v == "average") c.solver.u_update = UUpdate::kAverage;
         else throw ConfigError("u_update must be 'least_squares' or 'average'", line, key);
       }},
      {"u_cg_iter", number(&SolverConfig::u_cg_iter, &RunConfig::solver)},
      {"freeze_motion",
       [](RunConfig& c, const std::string& v, int line, const std::string& key) {
         c.solver.freeze_motion = parse_bool(v, line, key);
       }},
  };
  return keys;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  const std::map<std::string, Setter>* section = nullptr;
  int line = 0;
  bool custom_ellipses = false;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name == "phantom") section = &phantom_keys();
      else if (name == "solver") section = &solver_keys();
      else throw ConfigError("unknown section [" + name + "]", line, name);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!section) throw ConfigError("key '" + key + "' outside of a section", line, key);
    const auto it = section->find(key);
    if (it == section->end()) throw ConfigError("unknown key '" + key + "'", line, key);
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line, key);
    if (key == "ellipse" && !custom_ellipses) {
      cfg.phantom.ellipses.clear();
      custom_ellipses = true;
    }
    it->second(cfg, value, line, key);
  }
  try {
    cfg.phantom.validate();
    cfg.solver.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  const PhantomSpec& p = c.phantom;
  os << "[phantom]\n"
     << "width = " << p.width << "\n"
     << "height = " << p.height << "\n"
     << "T = " << p.frames << "\n"
     << "amplitude = " << fmt(p.amplitude) << "\n"
     << "period = " << p.period << "\n"
     << "mode = " << (p.mode == MotionMode::kTranslation ? "translation" : "compression") << "\n"
     << "noise_sigma = " << fmt(p.noise_sigma) << "\n"
     << "seed = " << p.seed << "\n"
     << "min_det = " << fmt(p.min_det) << "\n";
  for (const Ellipse& e : p.ellipses) {
    os << "ellipse = " << fmt(e.cx) << " " << fmt(e.cy) << " " << fmt(e.ax) << " " << fmt(e.ay) << " "
       << fmt(e.angle_deg) << " " << fmt(e.intensity) << "\n";
  }
  const SolverConfig& s = c.solver;
  os << "\n[solver]\n"
     << "a1 = " << fmt(s.a1) << "\n"
     << "a2 = " << fmt(s.a2) << "\n"
     << "gamma1 = " << fmt(s.gamma1) << "\n"
     << "gamma2 = " << fmt(s.gamma2) << "\n"
     << "gamma3 = " << fmt(s.gamma3) << "\n"
     << "theta = " << fmt(s.theta) << "\n"
     << "sigma = " << fmt(s.sigma) << "\n"
     << "k = " << s.k_outer << "\n"
     << "N = " << s.n_inner << "\n"
     << "n = " << s.n_chambolle << "\n"
     << "levels = " << s.pyramid_levels << "\n"
     << "dt_v = " << fmt(s.dt_v) << "\n"
     << "dt_phi = " << fmt(s.dt_phi) << "\n"
     << "delta_t = " << fmt(s.delta_t) << "\n"
     << "max_force_step = " << fmt(s.max_force_step) << "\n"
     << "max_halvings = " << s.max_halvings << "\n"
     << "det_floor = " << fmt(s.det_floor) << "\n"
     << "g_floor = " << fmt(s.g_floor) << "\n"
     << "inverse_tol = " << fmt(s.inverse_tol) << "\n"
     << "inverse_max_iter = " << s.inverse_max_iter << "\n"
     << "reference_index = " << s.reference_index << "\n"
     << "init = " << (s.init == InitMode::kMean ? "mean" : "reference") << "\n"
     << "u_update = " << (s.u_update == UUpdate::kAverage ? "average" : "least_squares") << "\n"
     << "u_cg_iter = " << s.u_cg_iter << "\n"
     << "freeze_motion = " << (s.freeze_motion ? "true" : "false") << "\n";
  return os.str();
}

bool operator==(const Ellipse& a, const Ellipse& b) {
  return a.cx == b.cx && a.cy == b.cy && a.ax == b.ax && a.ay == b.ay && a.angle_deg == b.angle_deg &&
         a.intensity == b.intensity;
}

bool operator==(const PhantomSpec& a, const PhantomSpec& b) {
  return a.width == b.width && a.height == b.height && a.ellipses == b.ellipses && a.amplitude == b.amplitude &&
         a.period == b.period && a.mode == b.mode && a.noise_sigma == b.noise_sigma && a.frames == b.frames &&
         a.seed == b.seed && a.min_det == b.min_det;
}

bool operator==(const SolverConfig& a, const SolverConfig& b) {
  return a.a1 == b.a1 && a.a2 == b.a2 && a.gamma1 == b.gamma1 && a.gamma2 == b.gamma2 && a.gamma3 == b.gamma3 &&
         a.theta == b.theta && a.sigma == b.sigma && a.k_outer == b.k_outer && a.n_inner == b.n_inner &&
         a.n_chambolle == b.n_chambolle && a.pyramid_levels == b.pyramid_levels && a.dt_v == b.dt_v &&
         a.dt_phi == b.dt_phi && a.delta_t == b.delta_t && a.max_force_step == b.max_force_step &&
         a.max_halvings == b.max_halvings && a.det_floor == b.det_floor && a.g_floor == b.g_floor &&
         a.inverse_tol == b.inverse_tol && a.inverse_max_iter == b.inverse_max_iter &&
         a.reference_index == b.reference_index && a.init == b.init && a.u_update == b.u_update &&
         a.u_cg_iter == b.u_cg_iter && a.freeze_motion == b.freeze_motion;
}

}  // namespace mocomp
