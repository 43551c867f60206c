#pragma once
// Run configuration, orchestration and report serialization for the
// command-line tool. Reports depend only on the configuration (the output
// path excluded) and are written atomically.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyhflow/surface_flow.hpp"

namespace lyh {

inline constexpr const char* kVersion = "0.3.0";

enum class Command { verify_identities, soliton_suite, run_flow, harnack_sweep };
std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct FlowSettings {
  std::string background = "sphere_axisym";
  Profile u{0.0, 0.1, 2, 0};
  Profile phi{1.0, 0.05, 1, 0};
  Profile f{};
  std::string f_init = "elliptic";  // elliptic | profile
  std::string phi_f_mode = "explicit_pde";
  int monitor_stride = 50;
  double dt_safety = 0.5;
  double blowup_factor = 1e3;
  bool f_inequality = true;
  std::vector<std::string> quadratics = known_quadratics();
};

struct RunConfig {
  Command command = Command::verify_identities;
  std::optional<std::string> solution;  // default depends on the command
  int resolution = 256;
  double t0 = 0.05;
  double t_end = 0.3;
  double stencil_h = 1e-3;
  int order = 4;
  std::optional<double> tolerance;
  int samples = 100;
  uint64_t seed = 1;
  std::string out;  // empty: standard output
  std::string format = "json";
  // suite tuning
  bool convergence = true;
  double coarse_h = 0.05;
  int w_samples = 50;
  int algebra_samples = 1000;
  FlowSettings flow;

  std::string solution_name() const;
  void validate() const;
};

// Overlay a YAML document onto cfg. Top-level keys are the flag names
// (solution, resolution, t0, t-end, stencil-h, order, tolerance, seed, out,
// format, samples); the nested tables suite: and flow: hold the rest.
void apply_yaml_file(RunConfig& cfg, const std::string& path);
void apply_yaml_text(RunConfig& cfg, const std::string& text);

// SHA-256 of the convention ledger string, hex encoded
std::string convention_hash();
const std::string& convention_ledger();

struct RunOutcome {
  int exit_code = 0;  // 0 pass, 1 check failure, 3 blow-up
  std::string body;   // serialized report in cfg.format
  bool pass = false;
};
// ConfigError and friends propagate; the caller maps them to exit 2
RunOutcome execute(const RunConfig& cfg);

// write to a sibling temporary and rename over path
void write_atomic(const std::string& path, const std::string& content);

}  // namespace lyh
