#include <oneapi/tbb/global_control.h>
#include <oneapi/tbb/info.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lyhflow/errors.hpp"
#include "lyhflow/harness.hpp"

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> solution;
  std::optional<int> resolution;
  std::optional<double> t0, t_end, stencil_h, tolerance;
  std::optional<int> order, samples;
  std::optional<uint64_t> seed;
  std::optional<std::string> out, format;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "YAML config file; flags override its values");
  sub->add_option("--solution", f.solution, "catalog solution, or a run-flow preset");
  sub->add_option("--resolution", f.resolution, "grid cells per direction (run-flow)");
  sub->add_option("--t0", f.t0, "initial time (run-flow)");
  sub->add_option("--t-end", f.t_end, "final time (run-flow)");
  sub->add_option("--stencil-h", f.stencil_h, "finite-difference step");
  sub->add_option("--order", f.order, "finite-difference order (2, 4, 6)");
  sub->add_option("--tolerance", f.tolerance, "tolerance override");
  sub->add_option("--samples", f.samples, "number of random sample points");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--out", f.out, "report path (default: standard output)");
  sub->add_option("--format", f.format, "json or csv");
}

lyh::RunConfig build_config(const std::string& command, const Flags& f) {
  lyh::RunConfig c;
  c.command = lyh::command_from_string(command);
  if (f.config) {
    lyh::apply_yaml_file(c, *f.config);
    if (c.command != lyh::command_from_string(command))
      throw lyh::ConfigError("config file command '" + lyh::to_string(c.command) + "' does not match '" + command + "'");
  }
  if (f.solution) c.solution = *f.solution;
  if (f.resolution) c.resolution = *f.resolution;
  if (f.t0) c.t0 = *f.t0;
  if (f.t_end) c.t_end = *f.t_end;
  if (f.stencil_h) c.stencil_h = *f.stencil_h;
  if (f.order) c.order = *f.order;
  if (f.tolerance) c.tolerance = *f.tolerance;
  if (f.samples) c.samples = *f.samples;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.format) c.format = *f.format;
  return c;
}

// LYHFLOW_THREADS caps the worker count; unset means all cores
int thread_cap() {
  const char* env = std::getenv("LYHFLOW_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw lyh::ConfigError("LYHFLOW_THREADS must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time connection identities, Harnack quadratics and surface Ricci flow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lyh::kVersion);
  Flags flags;
  for (const char* name : {"verify-identities", "soliton-suite", "run-flow", "harnack-sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_flags(sub, flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const lyh::RunConfig cfg = build_config(command, flags);
    const int cap = thread_cap();
    std::unique_ptr<tbb::global_control> limit;
    if (cap > 0) limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, cap);
    const int threads = cap > 0 ? std::min(cap, tbb::info::default_concurrency()) : tbb::info::default_concurrency();

    const auto start = std::chrono::steady_clock::now();
    const lyh::RunOutcome out = lyh::execute(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (cfg.out.empty()) {
      std::cout << out.body << std::flush;
    } else {
      lyh::write_atomic(cfg.out, out.body);
      nlohmann::ordered_json timing{{"wall_seconds", wall}, {"threads", threads}};
      lyh::write_atomic(cfg.out + ".timing.json", timing.dump(2) + "\n");
    }
    std::fprintf(stderr, "lyhflow %s: %s, exit %d, %.2f s on %d thread(s)\n", command.c_str(),
                 out.pass ? "pass" : "FAIL", out.exit_code, wall, threads);
    return out.exit_code;
  } catch (const lyh::BlowUpError& e) {
    std::fprintf(stderr, "lyhflow: %s\n", e.what());
    return 3;
  } catch (const lyh::Error& e) {
    std::fprintf(stderr, "lyhflow: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lyhflow: internal error: %s\n", e.what());
    return 2;
  }
}
