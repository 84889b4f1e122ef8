#include "nelson/scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nelson/closedform.hpp"
#include "nelson/control.hpp"
#include "nelson/errors.hpp"
#include "nelson/fpcore.hpp"
#include "nelson/nelson_sim.hpp"
#include "nelson/spectral.hpp"
#include "nelson/states.hpp"

namespace nelson {

using nlohmann::json;

namespace {

struct Schema {
  std::set<std::string> required;
  std::set<std::string> optional;
  bool time_positive = false;  // every sample time must be > 0
  bool time_nonnegative = false;
};

const std::set<std::string> kUnitParams{"m", "hbar", "D", "omega", "sigma0"};

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s{
      {"eigs", {{"n"}, {"sector", "k"}}},
      {"evolve", {{}, {"initial_level", "drift_level"}, false, true}},
      {"kernel", {{"kind", "x0"}, {}, true}},
      {"control", {{"flow"}, {"n", "x0", "a", "N", "tau", "b"}}},
      {"decay", {{}, {}, false, true}},
      {"coherent", {{"a", "N", "tau"}, {}, false, true}},
      {"squeeze", {{"b", "tau"}, {}}},
      {"simulate", {{"kind", "x0", "n_paths"}, {"n", "dt"}, true}},
  };
  return s;
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::size_t count_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(path, "must be a positive integer");
  return v.get<std::size_t>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown field");
  }
}

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // no "-0" in the output
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// CSV with '#' metadata lines, a column row, and %.12g values.
class Csv {
 public:
  void meta(const std::string& line) { meta_.push_back(line); }
  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ',';
      line += fmt(values[i]);
    }
    rows_.push_back(std::move(line));
  }
  void text_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    rows_.push_back(std::move(line));
  }
  std::string str() const {
    std::string out;
    for (const auto& m : meta_) out += "# " + m + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }

 private:
  std::vector<std::string> meta_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

struct Writer {
  const ScenarioConfig& cfg;
  std::filesystem::path dir;
  ScenarioArtifacts art;
  std::vector<std::pair<std::string, std::string>> written;  // name, bytes

  void write(const std::string& name, const std::string& bytes) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << bytes;
    if (!f) throw std::runtime_error("write failed for " + path.string());
    art.files.push_back(path);
    written.emplace_back(name, bytes);
  }

  void write_csv(const std::string& name, Csv& csv) {
    write(name, csv.str());
  }

  void finish() {
    json files = json::array();
    for (const auto& [name, bytes] : written) {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016" PRIx64, fnv1a64(bytes));
      files.push_back({{"name", name}, {"bytes", bytes.size()}, {"fnv1a64", hex}});
    }
    json manifest{{"scenario", cfg.scenario},
                  {"config", cfg.echo()},
                  {"versions",
                   {{"nelson", kVersion},
                    {"compiler", __VERSION__},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
                  {"files", files}};
    write(cfg.output + ".manifest.json", manifest.dump(2) + "\n");
  }
};

void common_meta(Csv& csv, const ScenarioConfig& cfg, const std::string& formula) {
  csv.meta("scenario: " + cfg.scenario);
  csv.meta("formula: " + formula);
  csv.meta("units: m=" + fmt(cfg.mass) + " hbar=" + fmt(cfg.hbar) + " omega=" + fmt(cfg.omega) +
           " D=" + fmt(cfg.diffusion()) + " sigma0=" + fmt(cfg.sigma0()));
}

OscillatorParams oscillator(const ScenarioConfig& cfg) {
  OscillatorParams p{cfg.mass, cfg.hbar, cfg.omega};
  p.validate();
  return p;
}

Grid1D space_grid(const ScenarioConfig& cfg) {
  const double l = cfg.grid_half_width * cfg.sigma0();
  return Grid1D(-l, l, cfg.n_points);
}

int level_param(const ScenarioConfig& cfg, const std::string& name, int fallback) {
  const double v = cfg.param_or(name, fallback);
  if (v != std::floor(v) || v < 0 || v > kMaxOscillatorLevel)
    throw ConfigError("params." + name, "must be an integer in [0, " + std::to_string(kMaxOscillatorLevel) + "]");
  return static_cast<int>(v);
}

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
  }
}

void run_eigs(const ScenarioConfig& cfg, Writer& w) {
  const int n = level_param(cfg, "n", 2);
  if (n != 1 && n != 2) throw ConfigError("params.n", "must be 1 or 2");
  const double L = kShootingTruncation;
  const std::vector<std::pair<double, double>> sectors =
      n == 1 ? std::vector<std::pair<double, double>>{{-L, 0.0}, {0.0, L}}
             : std::vector<std::pair<double, double>>{{-L, -1.0}, {-1.0, 1.0}, {1.0, L}};
  const double sector_v = cfg.param_or("sector", 1);
  if (sector_v != std::floor(sector_v) || sector_v < 0 || sector_v >= static_cast<double>(sectors.size()))
    throw ConfigError("params.sector", "must index one of the " + std::to_string(sectors.size()) + " sectors");
  const double k_v = cfg.param_or("k", 3);
  if (k_v != std::floor(k_v) || k_v < 1 || k_v > 20) throw ConfigError("params.k", "must be an integer in [1, 20]");
  const auto [lo, hi] = sectors[static_cast<std::size_t>(sector_v)];
  const int k = static_cast<int>(k_v);

  const auto shoot = solve_eigs_shooting(n, lo, hi, k);
  std::vector<ShootingRoot> roots;
  for (const auto& r : shoot.roots)
    if (r.mu > 1e-6) roots.push_back(r);

  // Adimensional units sigma0 = omega = 1 (D = 1), where lambda = mu.
  const StationaryState state(n, OscillatorParams::from_width(1.0, 1.0, 1.0));
  const DriftField drift = DriftField::from_state(state);
  const Grid1D grid(lo, hi, cfg.n_points);
  const auto sys = solve_eigs_fd(build_sl(drift, 1.0, lo, hi), grid, static_cast<int>(roots.size()) + 1);

  Csv csv;
  common_meta(csv, cfg, "Sturm-Liouville spectrum mu = lambda / omega of the level-n Fokker-Planck generator on one nodal sector");
  csv.meta("level: " + std::to_string(n) + " sector: [" + fmt(lo) + ", " + fmt(hi) + "] (units of sigma0)");
  csv.meta("fd grid: " + std::to_string(cfg.n_points) + " points, half-resolution change " + fmt(sys.resolution_change));
  for (const auto& m : shoot.warnings) csv.meta("warning: " + m);
  for (const auto& m : sys.warnings) csv.meta("warning: " + m);
  csv.columns({"index", "parity", "mu_shooting", "mu_fd", "rel_diff", "lambda"});
  const std::size_t count = std::min(roots.size(), sys.eigenvalues.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double ms = roots[i].mu, mf = sys.eigenvalues[i + 1];
    const Parity par = roots[i].parity != Parity::none ? roots[i].parity
                       : sys.parity.size() > i + 1     ? sys.parity[i + 1]
                                                       : Parity::none;
    csv.text_row({std::to_string(i + 1), parity_name(par), fmt(ms), fmt(mf), fmt(std::abs(ms - mf) / ms),
                  fmt(mf * cfg.omega)});
    w.art.notes.push_back("mu_" + std::to_string(i + 1) + " (" + parity_name(par) + ") = " + fmt(ms));
  }
  w.write_csv(cfg.output + ".csv", csv);
}

void run_evolve(const ScenarioConfig& cfg, Writer& w) {
  const auto p = oscillator(cfg);
  const int n0 = level_param(cfg, "initial_level", 1);
  const int nd = level_param(cfg, "drift_level", 0);
  const StationaryState init(n0, p), target(nd, p);
  const DriftField drift = DriftField::from_state(target);
  const Grid1D grid = space_grid(cfg);
  const auto breaks = split_domain(drift, grid).breakpoints;
  auto rho0 = GridDensity::from_function(grid, [&](double x) { return init.density(x); }, breaks);
  rho0.normalize();
  const auto times = cfg.times();
  EvolveOptions opt;
  opt.rate_scale = cfg.omega;
  const auto out = evolve_density(drift, cfg.diffusion(), rho0, times, opt);

  Csv csv;
  common_meta(csv, cfg, "Fokker-Planck evolution d_t rho = d_x(D d_x rho - v rho) of rho_" + std::to_string(n0) +
                            " under the level-" + std::to_string(nd) + " forward drift");
  csv.columns({"t", "x", "density"});
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({times[k], grid.x(i), out[k].values[i]});
  w.write_csv(cfg.output + ".csv", csv);
}

void run_kernel(const ScenarioConfig& cfg, Writer& w) {
  const auto p = oscillator(cfg);
  const std::string kind = cfg.text_param("kind", "");
  const double x0 = cfg.param("x0");
  const auto k = OUKernelParams::from(p, x0);
  std::function<double(double, double)> f;
  std::string formula;
  if (kind == "ou") {
    f = [&](double x, double t) { return ou_kernel(x, t, k); };
    formula = "OU transition density N(x0 e^{-w t}, s0^2 (1 - e^{-2 w t}))";
  } else if (kind == "excited") {
    if (x0 == 0.0) throw ConfigError("params.x0", "must be nonzero for the excited kernel");
    f = [&](double x, double t) { return excited_kernel(x, t, k); };
    formula = "first-excited transition density Theta(x x0) (x/alpha) [G(x - alpha) - G(x + alpha)] / (s sqrt(2 pi))";
  } else {
    throw ConfigError("params.kind", "must be \"ou\" or \"excited\"");
  }
  const Grid1D grid = space_grid(cfg);
  Csv csv;
  common_meta(csv, cfg, formula);
  csv.meta("x0: " + fmt(x0));
  csv.columns({"t", "x", "density"});
  for (double t : cfg.times())
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({t, grid.x(i), f(grid.x(i), t)});
  w.write_csv(cfg.output + ".csv", csv);
}

void run_decay(const ScenarioConfig& cfg, Writer& w) {
  const auto p = oscillator(cfg);
  const Grid1D grid = space_grid(cfg);
  Csv csv;
  common_meta(csv, cfg, "decay mixture beta^2 rho_0 + gamma^2 rho_1, beta^2 = 1 - e^{-2 w t}, gamma^2 = e^{-2 w t}");
  csv.columns({"t", "x", "density"});
  for (double t : cfg.times())
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({t, grid.x(i), decay_mixture(grid.x(i), t, p)});
  w.write_csv(cfg.output + ".csv", csv);
}

CoherentTransition coherent_spec(const ScenarioConfig& cfg) {
  CoherentTransition c;
  c.displacement = cfg.param("a");
  const double n = cfg.param("N");
  if (n != std::floor(n) || n < 2 || n > 60) throw ConfigError("params.N", "must be an integer in [2, 60]");
  c.order = static_cast<int>(n);
  c.tau = cfg.param("tau");
  if (!(c.tau > 0.0)) throw ConfigError("params.tau", "must be > 0");
  c.params = oscillator(cfg);
  return c;
}

SqueezeSpec squeeze_spec(const ScenarioConfig& cfg) {
  SqueezeSpec s{cfg.sigma0(), cfg.param("b"), cfg.param("tau"), cfg.diffusion(), cfg.mass};
  if (!(s.b > 0.0)) throw ConfigError("params.b", "must be > 0");
  if (!(s.tau > 0.0)) throw ConfigError("params.tau", "must be > 0");
  s.validate();
  return s;
}

void run_coherent(const ScenarioConfig& cfg, Writer& w) {
  const auto c = coherent_spec(cfg);
  const auto sw = c.switch_fn();
  Csv csv;
  common_meta(csv, cfg,
              "coherent-state switch-off: V_c = m w^2 x^2 / 2 + vc_linear x, drift A(t) - w x, "
              "F(t) = 1 - (1 - e^{-t ln N / tau})^N");
  csv.meta("a: " + fmt(c.displacement) + " N: " + std::to_string(c.order) + " tau: " + fmt(c.tau));
  csv.columns({"t", "switch", "drive", "mean", "vc_linear"});
  for (double t : cfg.times()) {
    const double lin = 0.5 * (coherent_transition_potential(1.0, t, c) - coherent_transition_potential(-1.0, t, c));
    csv.row({t, sw.value(t), c.drive(t), c.mean(t), lin});
  }
  w.write_csv(cfg.output + ".csv", csv);
}

void run_squeeze(const ScenarioConfig& cfg, Writer& w) {
  const auto s = squeeze_spec(cfg);
  Csv csv;
  common_meta(csv, cfg,
              "squeezing schedule S = (m/2)(Omega x^2 + Delta), V_c = (m/2)(omega2 x^2 + c), "
              "nu = s0^2 ((b + e^{-t/tau}) / (1 + e^{-t/tau}))^2");
  csv.meta("b: " + fmt(s.b) + " tau: " + fmt(s.tau));
  csv.columns({"t", "Omega", "Delta", "omega2", "c", "nu"});
  for (double t : cfg.times()) {
    const auto sc = squeeze_schedule(s, t);
    csv.row({t, sc.phase_curvature, sc.phase_offset, sc.omega_sq, sc.c, s.nu(t)});
  }
  w.write_csv(cfg.output + ".csv", csv);
}

void run_control(const ScenarioConfig& cfg, Writer& w) {
  const auto p = oscillator(cfg);
  const std::string flow = cfg.text_param("flow", "");
  FlowPair pair;
  std::function<double(double, double)> closed;
  bool positive_time = false;
  if (flow == "stationary") {
    pair = stationary_flow(level_param(cfg, "n", 0), p);
    closed = [p](double x, double) { return p.potential(x); };
  } else if (flow == "ou") {
    const double x0 = cfg.param("x0");
    pair = ou_relaxation_flow(p, x0);
    closed = [p, x0](double x, double t) { return ou_relaxation_potential(x, t, p, x0); };
    positive_time = true;
  } else if (flow == "excited") {
    const double x0 = cfg.param("x0");
    if (x0 == 0.0) throw ConfigError("params.x0", "must be nonzero for the excited flow");
    pair = excited_relaxation_flow(p, x0);
    closed = [p, x0](double x, double t) { return excited_relaxation_potential(x, t, p, x0); };
    positive_time = true;
  } else if (flow == "decay") {
    pair = decay_flow(p);
    closed = [p](double x, double t) { return decay_potential(x, t, p); };
    positive_time = true;
  } else if (flow == "coherent") {
    const auto c = coherent_spec(cfg);
    pair = coherent_transition_flow(c);
    closed = [c](double x, double t) { return coherent_transition_potential(x, t, c); };
  } else if (flow == "squeeze") {
    const auto s = squeeze_spec(cfg);
    pair = squeeze_flow(s);
    closed = [s](double x, double t) { return squeeze_schedule(s, t).potential(x, s.mass); };
  } else {
    throw ConfigError("params.flow", "must be one of stationary, ou, excited, decay, coherent, squeeze");
  }
  const auto times = cfg.times();
  if (positive_time && !(times.front() > 0.0)) throw ConfigError("time.t_start", "must be > 0 for this flow");

  const Grid1D grid = space_grid(cfg);
  Csv csv;
  common_meta(csv, cfg,
              "controlling potential V_c = (hbar^2/4m) d_xx ln rho + (hbar/2)(d_t ln rho + v d_x ln rho) "
              "- m v^2/2 - m d_t W + theta' for the " + flow + " flow");
  csv.columns({"t", "x", "v_synth", "v_closed", "abs_diff"});
  std::size_t skipped = 0;
  double worst = 0.0;
  for (double t : times) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      try {
        const double vs = synthesize_potential(pair, x, t);
        const double vc = closed(x, t);
        worst = std::max(worst, std::abs(vs - vc));
        csv.row({t, x, vs, vc, std::abs(vs - vc)});
      } catch (const SingularityError&) {
        ++skipped;
      } catch (const DomainError&) {
        ++skipped;
      }
    }
  }
  csv.meta("points skipped at singularities: " + std::to_string(skipped));
  w.art.notes.push_back("max |V_synth - V_closed| = " + fmt(worst));
  w.write_csv(cfg.output + ".csv", csv);
}

void run_simulate(const ScenarioConfig& cfg, Writer& w) {
  const auto p = oscillator(cfg);
  const std::string kind = cfg.text_param("kind", "");
  const double x0 = cfg.param("x0");
  DriftField drift;
  std::function<double(double, double)> analytic;
  const auto kp = OUKernelParams::from(p, x0);
  std::string formula = "Euler-Maruyama ensemble dx = v dt + sqrt(2 D dt) xi";
  if (kind == "ou") {
    drift = DriftField::restoring(p.omega);
    analytic = [kp](double x, double t) { return ou_kernel(x, t, kp); };
    formula += " with v = -w x against the OU transition density";
  } else if (kind == "excited") {
    drift = DriftField::from_state(StationaryState(1, p));
    analytic = [kp](double x, double t) { return excited_kernel(x, t, kp); };
    formula += " with the first-excited forward drift against its transition density";
  } else if (kind == "level") {
    drift = DriftField::from_state(StationaryState(level_param(cfg, "n", 0), p));
    formula += " with a stationary forward drift";
  } else {
    throw ConfigError("params.kind", "must be \"ou\", \"excited\" or \"level\"");
  }
  const double paths = cfg.param("n_paths");
  if (paths != std::floor(paths) || paths < 1 || paths > 4e9) throw ConfigError("params.n_paths", "must be a positive integer");

  EnsembleSpec spec;
  spec.n_paths = static_cast<std::size_t>(paths);
  spec.initial = InitialLaw::delta(x0);
  spec.times = cfg.times();
  spec.dt = cfg.param_or("dt", 0.01 / p.omega);
  if (!(spec.dt > 0.0)) throw ConfigError("params.dt", "must be > 0");
  spec.diffusion = p.diffusion();
  spec.seed = cfg.seed;
  spec.guard_radius = 1e-6 * p.sigma0();
  spec.rate_scale = p.omega;
  spec.grid = space_grid(cfg);
  const auto res = simulate_ensemble(drift, spec);

  Csv csv;
  common_meta(csv, cfg, formula);
  csv.meta("seed: " + std::to_string(cfg.seed) + " paths: " + std::to_string(spec.n_paths) + " dt: " + fmt(spec.dt));
  csv.columns(analytic ? std::vector<std::string>{"t", "x", "density", "analytic"}
                       : std::vector<std::string>{"t", "x", "density"});
  json snaps = json::array();
  for (const auto& e : res.snapshots) {
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
      if (analytic)
        csv.row({e.t, e.grid.x(i), e.values[i], analytic(e.grid.x(i), e.t)});
      else
        csv.row({e.t, e.grid.x(i), e.values[i]});
    }
    json s{{"t", e.t}, {"mean", e.mean}, {"variance", e.variance}, {"below", e.below},
           {"above", e.above}, {"sector_masses", e.sector_masses}};
    if (analytic) {
      const auto c = compare(e, [&](double x) { return analytic(x, e.t); });
      s["l1"] = c.l1;
      s["ks"] = c.ks;
      w.art.notes.push_back("t = " + fmt(e.t) + ": KS = " + fmt(c.ks) + ", L1 = " + fmt(c.l1));
    }
    snaps.push_back(s);
  }
  json meta{{"seed", cfg.seed},          {"dt", spec.dt},
            {"n_paths", spec.n_paths},   {"rejections", res.rejections},
            {"steps", res.steps},        {"substeps", res.substeps},
            {"escaped", res.escaped},    {"fidelity_warning", res.fidelity_warning},
            {"breakpoints", res.breakpoints}, {"snapshots", snaps}};
  if (res.fidelity_warning) w.art.notes.push_back("warning: rejection rate above 0.1%");
  w.write_csv(cfg.output + ".csv", csv);
  w.write(cfg.output + ".json", meta.dump(2) + "\n");
}

}  // namespace

double ScenarioConfig::sigma0() const { return std::sqrt(hbar / (2.0 * mass * omega)); }

double ScenarioConfig::param(const std::string& name) const {
  if (!params.contains(name)) throw ConfigError("params." + name, "required for scenario " + scenario);
  return number_at(params, name, "params." + name);
}

double ScenarioConfig::param_or(const std::string& name, double fallback) const {
  return params.contains(name) ? number_at(params, name, "params." + name) : fallback;
}

std::string ScenarioConfig::text_param(const std::string& name, const std::string& fallback) const {
  if (!params.contains(name)) {
    if (fallback.empty()) throw ConfigError("params." + name, "required for scenario " + scenario);
    return fallback;
  }
  const auto& v = params.at(name);
  if (!v.is_string()) throw ConfigError("params." + name, "must be a string");
  return v.get<std::string>();
}

std::vector<double> ScenarioConfig::times() const {
  std::vector<double> t(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    t[i] = n_samples == 1 ? t_start
                          : t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  if (n_samples > 1) t.back() = t_end;
  return t;
}

json ScenarioConfig::echo() const {
  return json{{"scenario", scenario},
              {"params", params},
              {"grid", {{"L", grid_half_width}, {"n_points", n_points}}},
              {"time", {{"t_start", t_start}, {"t_end", t_end}, {"n_samples", n_samples}}},
              {"seed", seed},
              {"output", output}};
}

ScenarioConfig parse_config(const json& doc, std::optional<std::uint64_t> seed,
                            std::optional<std::size_t> grid_points) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  reject_unknown(doc, {"scenario", "params", "grid", "time", "seed", "output"}, "");
  if (!doc.contains("scenario") || !doc.at("scenario").is_string())
    throw ConfigError("scenario", "required string field");
  ScenarioConfig cfg;
  cfg.scenario = doc.at("scenario").get<std::string>();
  const auto it = schemas().find(cfg.scenario);
  if (it == schemas().end())
    throw ConfigError("scenario", "unknown scenario \"" + cfg.scenario +
                                      "\" (expected eigs, evolve, kernel, control, decay, coherent, squeeze, simulate)");
  const Schema& schema = it->second;

  if (doc.contains("params")) {
    cfg.params = doc.at("params");
    if (!cfg.params.is_object()) throw ConfigError("params", "must be an object");
  }
  std::set<std::string> allowed = kUnitParams;
  allowed.insert(schema.required.begin(), schema.required.end());
  allowed.insert(schema.optional.begin(), schema.optional.end());
  reject_unknown(cfg.params, allowed, "params.");
  for (const auto& r : schema.required)
    if (!cfg.params.contains(r)) throw ConfigError("params." + r, "required for scenario " + cfg.scenario);

  cfg.mass = cfg.param_or("m", 1.0);
  cfg.omega = cfg.param_or("omega", 1.0);
  if (!(cfg.mass > 0.0)) throw ConfigError("params.m", "must be > 0");
  if (!(cfg.omega > 0.0)) throw ConfigError("params.omega", "must be > 0");
  int unit_keys = 0;
  for (const char* key : {"hbar", "D", "sigma0"}) unit_keys += cfg.params.contains(key) ? 1 : 0;
  if (unit_keys > 1) throw ConfigError("params", "give at most one of hbar, D, sigma0");
  if (cfg.params.contains("sigma0")) {
    const double s0 = cfg.param("sigma0");
    if (!(s0 > 0.0)) throw ConfigError("params.sigma0", "must be > 0");
    cfg.hbar = 2.0 * cfg.mass * cfg.omega * s0 * s0;
  } else if (cfg.params.contains("D")) {
    const double d = cfg.param("D");
    if (!(d > 0.0)) throw ConfigError("params.D", "must be > 0");
    cfg.hbar = 2.0 * cfg.mass * d;
  } else {
    cfg.hbar = cfg.param_or("hbar", 1.0);
    if (!(cfg.hbar > 0.0)) throw ConfigError("params.hbar", "must be > 0");
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (!g.is_object()) throw ConfigError("grid", "must be an object");
    reject_unknown(g, {"L", "n_points"}, "grid.");
    if (g.contains("L")) cfg.grid_half_width = number_at(g, "L", "grid.L");
    if (g.contains("n_points")) cfg.n_points = count_at(g, "n_points", "grid.n_points");
  }
  if (grid_points) cfg.n_points = *grid_points;
  if (!(cfg.grid_half_width > 0.0)) throw ConfigError("grid.L", "must be > 0");
  if (cfg.n_points < Grid1D::kMinPoints || cfg.n_points > 2000000)
    throw ConfigError("grid.n_points", "must lie in [16, 2000000]");

  if (doc.contains("time")) {
    const auto& t = doc.at("time");
    if (!t.is_object()) throw ConfigError("time", "must be an object");
    reject_unknown(t, {"t_start", "t_end", "n_samples"}, "time.");
    if (t.contains("t_start")) cfg.t_start = number_at(t, "t_start", "time.t_start");
    if (t.contains("t_end")) cfg.t_end = number_at(t, "t_end", "time.t_end");
    if (t.contains("n_samples")) cfg.n_samples = count_at(t, "n_samples", "time.n_samples");
  }
  if (cfg.n_samples > 100000) throw ConfigError("time.n_samples", "must be <= 100000");
  if (!(cfg.t_end >= cfg.t_start)) throw ConfigError("time.t_end", "must be >= t_start");
  if (schema.time_positive && !(cfg.t_start > 0.0)) throw ConfigError("time.t_start", "must be > 0 for scenario " + cfg.scenario);
  if (schema.time_nonnegative && !(cfg.t_start >= 0.0)) throw ConfigError("time.t_start", "must be >= 0 for scenario " + cfg.scenario);

  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      throw ConfigError("seed", "must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (seed) cfg.seed = *seed;

  cfg.output = cfg.scenario;
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    if (!o.is_string() || o.get<std::string>().empty()) throw ConfigError("output", "must be a non-empty string");
    cfg.output = o.get<std::string>();
    if (cfg.output.find('/') != std::string::npos) throw ConfigError("output", "must be a file stem, not a path");
  }
  return cfg;
}

ScenarioArtifacts run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Writer w{cfg, out_dir, {}, {}};
  static const std::map<std::string, void (*)(const ScenarioConfig&, Writer&)> runners{
      {"eigs", run_eigs},       {"evolve", run_evolve},     {"kernel", run_kernel},
      {"control", run_control}, {"decay", run_decay},       {"coherent", run_coherent},
      {"squeeze", run_squeeze}, {"simulate", run_simulate},
  };
  runners.at(cfg.scenario)(cfg, w);
  w.finish();
  return w.art;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace nelson
