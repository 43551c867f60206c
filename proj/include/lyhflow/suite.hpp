#pragma once
// Sample-based runners behind the command line: the space-time identity
// suite, the soliton suite and the Harnack sweep. Samples are evaluated in
// parallel and reduced in sample order, so results depend only on the
// configuration and the seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyhflow/catalog.hpp"
#include "lyhflow/fd.hpp"
#include "lyhflow/spacetime.hpp"

namespace lyh {

struct SuiteConfig {
  std::string solution = "round_sphere_2d";
  DerivativeStencil stencil;
  int samples = 100;
  uint64_t seed = 1;
  std::optional<double> tolerance;  // replaces default_tolerance(scale)
  bool convergence = true;
  double coarse_h = 0.05;           // order measured at (coarse_h, coarse_h / 2)
  int w_samples = 50;               // random W for the soliton Z check
  int algebra_samples = 1000;       // random inputs for the algebraic identities
  void validate() const;
};

struct SuiteResult {
  std::vector<IdentityReport> reports;
  bool pass() const;
};

SuiteResult run_identity_suite(const SuiteConfig& cfg);
SuiteResult run_soliton_suite(const SuiteConfig& cfg);

struct SweepEntry {
  std::string quadratic_id;
  double min_eigenvalue = 0.0;
  int argmin_sample = -1;
  double u_norm = 0.0, w_norm = 0.0;
  double scale = 0.0;
  bool gated = false;  // non-negativity is expected and enforced
  bool pass = true;
};
struct SweepResult {
  std::vector<SweepEntry> quadratics;
  std::vector<IdentityReport> algebra;  // scaling, trace and sharp-oracle identities
  bool pass() const;
};
SweepResult run_harnack_sweep(const SuiteConfig& cfg);

// uniform samples in the family's sample box
std::vector<ChartPoint> sample_points(const MetricFamily& fam, int count, uint64_t seed);

}  // namespace lyh
