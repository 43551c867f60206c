#include "lyhflow/harness.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <openssl/evp.h>
#include <unistd.h>
#include <yaml-cpp/yaml.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <nlohmann/json.hpp>
#include <oneapi/tbb/version.h>
#include <set>
#include <sstream>

#include "lyhflow/catalog.hpp"
#include "lyhflow/errors.hpp"
#include "lyhflow/suite.hpp"

namespace lyh {

using json = nlohmann::ordered_json;

std::string to_string(Command c) {
  switch (c) {
    case Command::verify_identities: return "verify-identities";
    case Command::soliton_suite: return "soliton-suite";
    case Command::run_flow: return "run-flow";
    case Command::harnack_sweep: return "harnack-sweep";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::verify_identities, Command::soliton_suite, Command::run_flow, Command::harnack_sweep})
    if (to_string(c) == s) return c;
  throw ConfigError("unknown command '" + s + "'");
}

std::string RunConfig::solution_name() const {
  if (solution) return *solution;
  switch (command) {
    case Command::soliton_suite: return "cigar";
    case Command::run_flow: return "perturbed_sphere";
    default: return "round_sphere_2d";
  }
}

namespace {

const std::set<std::string> kFlowPresets{"perturbed_sphere", "round_sphere_2d", "flat_torus", "custom"};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void RunConfig::validate() const {
  require(format == "json" || format == "csv", "format must be json or csv");
  require(samples >= 1, "samples must be positive");
  require(!tolerance || *tolerance > 0.0, "tolerance must be positive");
  require(stencil_h > 0.0 && std::isfinite(stencil_h), "stencil-h must be positive");
  require(order == 2 || order == 4 || order == 6, "order must be 2, 4 or 6");
  if (command == Command::run_flow) {
    require(kFlowPresets.count(solution_name()) == 1,
            "run-flow solution must be perturbed_sphere, round_sphere_2d, flat_torus or custom");
    require(resolution >= 4, "resolution must be at least 4");
    require(std::isfinite(t0) && std::isfinite(t_end) && t_end > t0, "t-end must exceed t0");
    require(flow.f_init == "elliptic" || flow.f_init == "profile", "flow.f-init must be elliptic or profile");
    require(flow.monitor_stride >= 1, "flow.monitor-stride must be positive");
    require(flow.dt_safety > 0.0 && flow.dt_safety <= 1.0, "flow.dt-safety must lie in (0, 1]");
    background_from_string(flow.background);
    phi_f_mode_from_string(flow.phi_f_mode);
    const std::vector<std::string> known = known_quadratics();
    for (const std::string& q : flow.quadratics)
      require(std::find(known.begin(), known.end(), q) != known.end(), "unknown quadratic '" + q + "'");
  } else {
    require(format == "json", "csv output is available for run-flow only");
    require(has_catalog(solution_name()), "unknown catalog solution '" + solution_name() + "'");
  }
}

// ---------------------------------------------------------------------------
// YAML

namespace {

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) throw ConfigError(where + " must be a table");
  for (const auto& kv : map) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) throw ConfigError("unknown config key '" + where + k + "'");
  }
}

void read_profile(Profile& p, const YAML::Node& n, const std::string& where) {
  check_keys(n, {"constant", "amplitude", "mode-x", "mode-y"}, where);
  if (n["constant"]) p.constant = scalar<double>(n["constant"], where + "constant");
  if (n["amplitude"]) p.amplitude = scalar<double>(n["amplitude"], where + "amplitude");
  if (n["mode-x"]) p.mode_x = scalar<int>(n["mode-x"], where + "mode-x");
  if (n["mode-y"]) p.mode_y = scalar<int>(n["mode-y"], where + "mode-y");
}

void apply_yaml(RunConfig& cfg, const YAML::Node& root) {
  if (root.IsNull()) return;
  check_keys(root,
             {"command", "solution", "resolution", "t0", "t-end", "stencil-h", "order", "tolerance", "seed", "out",
              "format", "samples", "suite", "flow"},
             "");
  if (root["command"]) cfg.command = command_from_string(scalar<std::string>(root["command"], "command"));
  if (root["solution"]) cfg.solution = scalar<std::string>(root["solution"], "solution");
  if (root["resolution"]) cfg.resolution = scalar<int>(root["resolution"], "resolution");
  if (root["t0"]) cfg.t0 = scalar<double>(root["t0"], "t0");
  if (root["t-end"]) cfg.t_end = scalar<double>(root["t-end"], "t-end");
  if (root["stencil-h"]) cfg.stencil_h = scalar<double>(root["stencil-h"], "stencil-h");
  if (root["order"]) cfg.order = scalar<int>(root["order"], "order");
  if (root["tolerance"]) cfg.tolerance = scalar<double>(root["tolerance"], "tolerance");
  if (root["seed"]) cfg.seed = scalar<uint64_t>(root["seed"], "seed");
  if (root["out"]) cfg.out = scalar<std::string>(root["out"], "out");
  if (root["format"]) cfg.format = scalar<std::string>(root["format"], "format");
  if (root["samples"]) cfg.samples = scalar<int>(root["samples"], "samples");

  if (const YAML::Node s = root["suite"]) {
    check_keys(s, {"convergence", "coarse-h", "w-samples", "algebra-samples"}, "suite.");
    if (s["convergence"]) cfg.convergence = scalar<bool>(s["convergence"], "suite.convergence");
    if (s["coarse-h"]) cfg.coarse_h = scalar<double>(s["coarse-h"], "suite.coarse-h");
    if (s["w-samples"]) cfg.w_samples = scalar<int>(s["w-samples"], "suite.w-samples");
    if (s["algebra-samples"]) cfg.algebra_samples = scalar<int>(s["algebra-samples"], "suite.algebra-samples");
  }
  if (const YAML::Node f = root["flow"]) {
    check_keys(f,
               {"background", "u", "phi", "f", "f-init", "phi-f-mode", "monitor-stride", "dt-safety", "blowup-factor",
                "f-inequality", "quadratics"},
               "flow.");
    FlowSettings& fs = cfg.flow;
    if (f["background"]) fs.background = scalar<std::string>(f["background"], "flow.background");
    if (f["u"]) read_profile(fs.u, f["u"], "flow.u.");
    if (f["phi"]) read_profile(fs.phi, f["phi"], "flow.phi.");
    if (f["f"]) read_profile(fs.f, f["f"], "flow.f.");
    if (f["f-init"]) fs.f_init = scalar<std::string>(f["f-init"], "flow.f-init");
    if (f["phi-f-mode"]) fs.phi_f_mode = scalar<std::string>(f["phi-f-mode"], "flow.phi-f-mode");
    if (f["monitor-stride"]) fs.monitor_stride = scalar<int>(f["monitor-stride"], "flow.monitor-stride");
    if (f["dt-safety"]) fs.dt_safety = scalar<double>(f["dt-safety"], "flow.dt-safety");
    if (f["blowup-factor"]) fs.blowup_factor = scalar<double>(f["blowup-factor"], "flow.blowup-factor");
    if (f["f-inequality"]) fs.f_inequality = scalar<bool>(f["f-inequality"], "flow.f-inequality");
    if (f["quadratics"]) fs.quadratics = scalar<std::vector<std::string>>(f["quadratics"], "flow.quadratics");
  }
}

}  // namespace

void apply_yaml_file(RunConfig& cfg, const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file '" + path + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  apply_yaml(cfg, root);
}

void apply_yaml_text(RunConfig& cfg, const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  apply_yaml(cfg, root);
}

// ---------------------------------------------------------------------------
// convention ledger

const std::string& convention_ledger() {
  static const std::string s =
      "lyhflow conventions v1\n"
      "riemann: R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_ip G^p_jk - G^l_jp G^p_ik, lowered on the last slot\n"
      "ricci: Rc_jk = R^l_ljk; R_1221 = K det g\n"
      "hamilton order: R^H_abcd = R_abdc\n"
      "space-time index 0 is time; mu = 1/2 uses tbar = ln t and gbar = g / t\n"
      "lambda2: U^ij antisymmetric, <U,V> = g_ik g_jl U^ij V^kl, basis (e_a ^ e_b)/sqrt2 for a < b then e_a\n"
      "forms: A lowered 2-form, E 1-form; surface pair A = phi dS, E = -2 df\n"
      "surface frame: e^{-u} (d_1, d_2 / sin theta) on the sphere, e^{-u} (d_x, d_y) on the torus\n";
  return s;
}

std::string convention_hash() {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const std::string& s = convention_ledger();
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1) throw NumericError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// reports

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json profile_json(const Profile& p) {
  return json{{"constant", p.constant}, {"amplitude", p.amplitude}, {"mode-x", p.mode_x}, {"mode-y", p.mode_y}};
}

json config_echo(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["solution"] = c.solution_name();
  j["seed"] = c.seed;
  j["format"] = c.format;
  if (c.command == Command::run_flow) {
    j["resolution"] = c.resolution;
    j["t0"] = c.t0;
    j["t-end"] = c.t_end;
    j["tolerance"] = num(c.tolerance);
    const FlowSettings& f = c.flow;
    j["flow"] = json{{"background", f.background},
                     {"u", profile_json(f.u)},
                     {"phi", profile_json(f.phi)},
                     {"f", profile_json(f.f)},
                     {"f-init", f.f_init},
                     {"phi-f-mode", f.phi_f_mode},
                     {"monitor-stride", f.monitor_stride},
                     {"dt-safety", f.dt_safety},
                     {"blowup-factor", f.blowup_factor},
                     {"f-inequality", f.f_inequality},
                     {"quadratics", f.quadratics}};
  } else {
    j["stencil-h"] = c.stencil_h;
    j["order"] = c.order;
    j["tolerance"] = num(c.tolerance);
    j["samples"] = c.samples;
    j["suite"] = json{{"convergence", c.convergence},
                      {"coarse-h", c.coarse_h},
                      {"w-samples", c.w_samples},
                      {"algebra-samples", c.algebra_samples}};
  }
  return j;
}

json header(const RunConfig& c) {
  json j;
  j["tool"] = "lyhflow";
  j["command"] = to_string(c.command);
  j["seed"] = c.seed;
  j["convention_hash"] = convention_hash();
  j["versions"] = json{{"lyhflow", kVersion},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                     "." + std::to_string(EIGEN_MINOR_VERSION)},
                       {"tbb", std::to_string(TBB_VERSION_MAJOR) + "." + std::to_string(TBB_VERSION_MINOR)}};
  j["config"] = config_echo(c);
  return j;
}

json report_json(const IdentityReport& r) {
  json j;
  j["identity"] = r.identity_name;
  j["configuration"] = r.configuration;
  j["max_residual"] = num(r.max_residual);
  j["tolerance"] = r.tolerance;
  j["scale"] = num(r.scale);
  j["sample_count"] = r.sample_count;
  j["convergence_order"] = num(r.convergence_order);
  j["exact"] = r.exact;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void summarize(json& j, const std::vector<IdentityReport>& reps, bool pass) {
  int failed = 0;
  for (const IdentityReport& r : reps) failed += r.pass ? 0 : 1;
  j["summary"] = json{{"checks", reps.size()}, {"failed", failed}, {"pass", pass}};
}

SuiteConfig suite_config(const RunConfig& c) {
  SuiteConfig s;
  s.solution = c.solution_name();
  s.stencil.spatial_step = c.stencil_h;
  s.stencil.time_step = c.stencil_h;
  s.stencil.order = c.order;
  s.samples = c.samples;
  s.seed = c.seed;
  s.tolerance = c.tolerance;
  s.convergence = c.convergence;
  s.coarse_h = c.coarse_h;
  s.w_samples = c.w_samples;
  s.algebra_samples = c.algebra_samples;
  return s;
}

RunOutcome finish(json& j, bool pass) {
  RunOutcome out;
  out.pass = pass;
  out.exit_code = pass ? 0 : 1;
  out.body = j.dump(2) + "\n";
  return out;
}

RunOutcome run_suite(const RunConfig& c) {
  const SuiteConfig s = suite_config(c);
  const SuiteResult r = c.command == Command::soliton_suite ? run_soliton_suite(s) : run_identity_suite(s);
  json j = header(c);
  json reps = json::array();
  for (const IdentityReport& x : r.reports) reps.push_back(report_json(x));
  j["reports"] = reps;
  summarize(j, r.reports, r.pass());
  return finish(j, r.pass());
}

RunOutcome run_sweep(const RunConfig& c) {
  const SweepResult r = run_harnack_sweep(suite_config(c));
  json j = header(c);
  json qs = json::array();
  for (const SweepEntry& q : r.quadratics)
    qs.push_back(json{{"quadratic_id", q.quadratic_id},
                      {"min_eigenvalue", num(q.min_eigenvalue)},
                      {"argmin_sample", q.argmin_sample},
                      {"u_norm", num(q.u_norm)},
                      {"w_norm", num(q.w_norm)},
                      {"scale", num(q.scale)},
                      {"gated", q.gated},
                      {"pass", q.pass}});
  j["quadratics"] = qs;
  json alg = json::array();
  for (const IdentityReport& x : r.algebra) alg.push_back(report_json(x));
  j["algebra"] = alg;
  int failed = 0;
  for (const SweepEntry& q : r.quadratics) failed += q.pass ? 0 : 1;
  for (const IdentityReport& x : r.algebra) failed += x.pass ? 0 : 1;
  j["summary"] = json{{"checks", r.quadratics.size() + r.algebra.size()}, {"failed", failed}, {"pass", r.pass()}};
  return finish(j, r.pass());
}

// --- run-flow ---------------------------------------------------------------

struct FlowCheck {
  std::string name;
  double value;
  double threshold;  // value >= threshold passes, unless upper
  bool upper = false;
  bool gated = true;
  bool pass() const { return std::isfinite(value) && (upper ? value <= threshold : value >= threshold); }
};

SurfaceState initial_state(const RunConfig& c, double& margin) {
  const std::string sol = c.solution_name();
  margin = std::numeric_limits<double>::quiet_NaN();
  if (sol == "round_sphere_2d") return exact_sphere_state(c.resolution, c.t0);
  if (sol == "flat_torus") return make_state(Background::torus, c.resolution, c.t0, {}, {1.0}, {c.t0});
  const FlowSettings& f = c.flow;
  Background bg = sol == "perturbed_sphere" ? Background::sphere_axisym : background_from_string(f.background);
  SurfaceState s = make_state(bg, c.resolution, c.t0, f.u, f.phi, f.f);
  if (f.f_init == "elliptic") margin = init_f_elliptic(s);
  return s;
}

json monitor_json(const MonitorRecord& m) {
  json j;
  j["t"] = m.t;
  j["gauss_bonnet"] = m.gauss_bonnet;
  j["min_R"] = m.min_r;
  j["max_R"] = m.max_r;
  j["min_F"] = num(m.min_f);
  j["undefined_F_count"] = m.undefined_f;
  j["min_N"] = num(m.min_n);
  j["N_scale"] = m.n_scale;
  j["min_F_residual"] = num(m.min_f_residual);
  j["F_residual_scale"] = m.f_residual_scale;
  j["min_monotone_delta"] = num(m.min_monotone_delta);
  j["monotone_scale"] = m.monotone_scale;
  json qs = json::array();
  for (const QuadraticSample& q : m.quadratics)
    qs.push_back(json{{"quadratic_id", q.quadratic_id},
                      {"min_eigenvalue", num(q.min_eigenvalue)},
                      {"argmin_index", q.argmin_index},
                      {"u_norm", num(q.u_norm)},
                      {"w_norm", num(q.w_norm)},
                      {"scale", num(q.scale)}});
  j["quadratics"] = qs;
  return j;
}

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flow_csv(const FlowResult& r) {
  std::ostringstream os;
  os << "t,quadratic_id,grid_min_eigenvalue,argmin_norms,gauss_bonnet,min_F,undefined_F_count\n";
  for (const MonitorRecord& m : r.series)
    for (const QuadraticSample& q : m.quadratics)
      os << g17(m.t) << ',' << q.quadratic_id << ',' << g17(q.min_eigenvalue) << ',' << g17(q.u_norm) << ';'
         << g17(q.w_norm) << ',' << g17(m.gauss_bonnet) << ',' << g17(m.min_f) << ',' << m.undefined_f << '\n';
  return os.str();
}

std::vector<FlowCheck> flow_checks(const RunConfig& c, const FlowResult& r) {
  std::vector<FlowCheck> out;
  const MonitorRecord& first = r.series.front();
  const bool sphere = r.final_state.background == Background::sphere_axisym;

  double drift = 0.0;
  for (const MonitorRecord& m : r.series) drift = std::max(drift, std::abs(m.gauss_bonnet - first.gauss_bonnet));
  out.push_back({"gauss_bonnet_drift", drift / std::max(1.0, std::abs(first.gauss_bonnet)), 1e-4, true});

  double min_n = std::numeric_limits<double>::infinity();
  for (const MonitorRecord& m : r.series)
    if (std::isfinite(m.min_n)) min_n = std::min(min_n, m.min_n);
  if (std::isfinite(min_n)) out.push_back({"n_monitor", min_n, -1e-8});

  if (c.flow.f_inequality) {
    double worst = std::numeric_limits<double>::infinity();
    for (const MonitorRecord& m : r.series)
      if (m.min_f_residual) worst = std::min(worst, *m.min_f_residual / std::max(m.f_residual_scale, 1e-300));
    if (std::isfinite(worst)) out.push_back({"f_inequality_relative", worst, -1e-3});
  }

  if (sphere && first.min_r > 0.0) {
    double worst = std::numeric_limits<double>::infinity();
    for (const MonitorRecord& m : r.series)
      if (m.min_monotone_delta) worst = std::min(worst, *m.min_monotone_delta / std::max(m.monotone_scale, 1e-300));
    if (std::isfinite(worst)) out.push_back({"monotone_relative", worst, -1e-5});
  }

  FlowCheck hyp{"hypothesis_at_t0", r.hypothesis_met ? 1.0 : 0.0, 1.0};
  hyp.gated = false;
  out.push_back(hyp);
  FlowCheck per{"persistence", r.persisted ? 1.0 : 0.0, 1.0};
  per.gated = r.hypothesis_met;  // no claim without the hypothesis
  out.push_back(per);

  if (c.solution_name() == "round_sphere_2d") {
    // R(t) = 2 / (1 - 2t) for the unit sphere
    const double t = r.final_state.time;
    const double exact = 2.0 / (1.0 - 2.0 * t);
    double err = 0.0;
    for (double v : scalar_curvature(r.final_state)) err = std::max(err, std::abs(v - exact) / exact);
    out.push_back({"exact_curvature_relative_error", err, 1e-5, true});
  }
  return out;
}

RunOutcome run_flow(const RunConfig& c) {
  double margin = 0.0;
  SurfaceState init = initial_state(c, margin);
  FlowConfig fc;
  fc.t_end = c.t_end;
  fc.dt_safety = c.flow.dt_safety;
  fc.monitor_stride = c.flow.monitor_stride;
  fc.quadratics = c.flow.quadratics;
  fc.phi_f_mode = phi_f_mode_from_string(c.flow.phi_f_mode);
  fc.blowup_factor = c.flow.blowup_factor;
  fc.f_inequality = c.flow.f_inequality;
  if (c.tolerance) fc.persistence_eps = *c.tolerance;

  json j = header(c);
  FlowResult r;
  try {
    r = run_with_monitors(init, fc);
  } catch (const BlowUpError& e) {
    j["flow"] = json{{"completed", false}, {"stop_reason", "non-finite"}, {"error", e.what()}};
    j["series"] = json::array();
    j["summary"] = json{{"checks", 0}, {"failed", 0}, {"pass", false}};
    RunOutcome out = finish(j, false);
    out.exit_code = 3;
    if (c.format == "csv") out.body = flow_csv(r);
    return out;
  }

  const std::vector<FlowCheck> checks = flow_checks(c, r);
  bool pass = true;
  int failed = 0;
  json cj = json::array();
  for (const FlowCheck& k : checks) {
    cj.push_back(json{{"name", k.name},
                      {"value", num(k.value)},
                      {k.upper ? "max" : "min", k.threshold},
                      {"gated", k.gated},
                      {"pass", k.pass()}});
    if (k.gated && !k.pass()) {
      pass = false;
      ++failed;
    }
  }
  j["flow"] = json{{"background", to_string(r.final_state.background)},
                   {"boundary", r.final_state.bc_record},
                   {"resolution", r.final_state.resolution},
                   {"elliptic_margin", num(margin)},
                   {"completed", r.completed},
                   {"stop_reason", r.stop_reason},
                   {"steps", r.steps},
                   {"t_final", r.final_state.time},
                   {"hypothesis_met", r.hypothesis_met},
                   {"persisted", r.persisted},
                   {"curvature_sign_change", r.curvature_sign_change}};
  j["checks"] = cj;
  json series = json::array();
  for (const MonitorRecord& m : r.series) series.push_back(monitor_json(m));
  j["series"] = series;
  j["summary"] = json{{"checks", checks.size()}, {"failed", failed}, {"pass", pass && r.completed}};

  RunOutcome out = finish(j, pass && r.completed);
  if (!r.completed) out.exit_code = 3;
  if (c.format == "csv") out.body = flow_csv(r);
  return out;
}

}  // namespace

RunOutcome execute(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.command) {
    case Command::verify_identities:
    case Command::soliton_suite: return run_suite(cfg);
    case Command::harnack_sweep: return run_sweep(cfg);
    case Command::run_flow: return run_flow(cfg);
  }
  throw ConfigError("unknown command");
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::string tmpl = (dir / ("." + target.filename().string() + ".XXXXXX")).string();
  const int fd = mkstemp(tmpl.data());
  if (fd < 0) throw ConfigError("cannot create a temporary file next to '" + path + "'");
  size_t done = 0;
  while (done < content.size()) {
    const ssize_t n = ::write(fd, content.data() + done, content.size() - done);
    if (n <= 0) {
      ::close(fd);
      ::unlink(tmpl.c_str());
      throw ConfigError("write to '" + path + "' failed");
    }
    done += static_cast<size_t>(n);
  }
  ::fchmod(fd, 0644);
  ::fsync(fd);
  ::close(fd);
  if (std::rename(tmpl.c_str(), path.c_str()) != 0) {
    ::unlink(tmpl.c_str());
    throw ConfigError("cannot rename the report onto '" + path + "'");
  }
}

}  // namespace lyh
