#include <algorithm>
#include <set>

#include "doctest.h"
#include "lyhflow/errors.hpp"
#include "lyhflow/suite.hpp"

using namespace lyh;

namespace {

SuiteConfig small(const std::string& name, int samples = 6) {
  SuiteConfig c;
  c.solution = name;
  c.samples = samples;
  c.w_samples = 10;
  c.algebra_samples = 50;
  return c;
}

const IdentityReport* find(const SuiteResult& r, const std::string& name) {
  for (const IdentityReport& x : r.reports)
    if (x.identity_name == name) return &x;
  return nullptr;
}

}  // namespace

TEST_CASE("suite configuration is validated") {
  SuiteConfig c;
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SuiteConfig{};
  c.tolerance = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SuiteConfig{};
  c.solution = "moebius";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SuiteConfig{};
  c.stencil.spatial_step = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("identity suite on the flat torus") {
  SuiteConfig c = small("flat_torus");
  c.convergence = false;
  SuiteResult r = run_identity_suite(c);
  CHECK(r.pass());
  std::set<std::string> configs;
  for (const IdentityReport& x : r.reports) {
    CHECK(x.sample_count == c.samples);
    CHECK(x.max_residual <= 1e-9);
    configs.insert(x.configuration);
  }
  // mu in {0, 1/2} times {no forms, surface forms}
  CHECK(configs.size() == 4);
}

TEST_CASE("identity suite on the cigar with convergence orders") {
  SuiteConfig c = small("cigar", 4);
  SuiteResult r = run_identity_suite(c);
  CHECK(r.pass());
  for (const std::string name : {"compatibility", "curvature_closed_form", "bianchi_second", "evolution", "rpm_p"}) {
    const IdentityReport* x = find(r, name);
    REQUIRE(x != nullptr);
    if (!x->exact) {
      REQUIRE(x->convergence_order.has_value());
      CHECK(*x->convergence_order >= 3.5);
    }
  }
  const IdentityReport* sharp = find(r, "sharp_oracle");
  REQUIRE(sharp != nullptr);
  CHECK(sharp->exact);
}

TEST_CASE("identity suite is reproducible and seed dependent") {
  SuiteConfig c = small("round_sphere_2d", 3);
  c.convergence = false;
  SuiteResult a = run_identity_suite(c), b = run_identity_suite(c);
  REQUIRE(a.reports.size() == b.reports.size());
  for (size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i].max_residual == b.reports[i].max_residual);
  c.seed = 99;
  SuiteResult d = run_identity_suite(c);
  bool differs = false;
  for (size_t i = 0; i < a.reports.size(); ++i) differs |= a.reports[i].max_residual != d.reports[i].max_residual;
  CHECK(differs);
}

TEST_CASE("a tight tolerance override turns residuals into failures") {
  SuiteConfig c = small("cigar", 3);
  c.convergence = false;
  c.tolerance = 1e-300;
  SuiteResult r = run_identity_suite(c);
  CHECK_FALSE(r.pass());
  for (const IdentityReport& x : r.reports) CHECK(x.tolerance == 1e-300);
}

TEST_CASE("identity suite needs a flow solution") {
  CHECK_THROWS_AS(run_identity_suite(small("perturbed_sphere")), ScopeError);
}

TEST_CASE("soliton suite") {
  SUBCASE("cigar") {
    SuiteResult r = run_soliton_suite(small("cigar"));
    CHECK(r.pass());
    for (const std::string name : {"parallel_v", "curvature_annihilation", "z_sharpness", "divergence_identities",
                                   "wrong_picture_control"})
      CHECK(find(r, name) != nullptr);
    CHECK(find(r, "wrong_picture_control")->max_residual > 1e-2);
  }
  SUBCASE("expanding Gaussian") {
    SuiteResult r = run_soliton_suite(small("flat_gaussian_expanding"));
    CHECK(r.pass());
    CHECK(find(r, "parallel_v")->max_residual <= 1e-9);
  }
  SUBCASE("shrinking sphere uses the homothetic form only") {
    SuiteResult r = run_soliton_suite(small("round_sphere_2d"));
    CHECK(r.pass());
    CHECK(find(r, "soliton_equation") != nullptr);
    CHECK(find(r, "parallel_v") == nullptr);
    CHECK(find(r, "wrong_picture_control") == nullptr);
  }
  SUBCASE("non-solitons are rejected") {
    CHECK_THROWS_AS(run_soliton_suite(small("flat_torus")), ConfigError);
  }
}

TEST_CASE("harnack sweep") {
  SUBCASE("round sphere") {
    SweepResult r = run_harnack_sweep(small("round_sphere_2d", 20));
    CHECK(r.pass());
    std::set<std::string> ids;
    for (const SweepEntry& q : r.quadratics) {
      ids.insert(q.quadratic_id);
      CHECK(q.min_eigenvalue > 0.0);
      CHECK(q.argmin_sample >= 0);
    }
    CHECK(ids == std::set<std::string>{"hamilton_Z", "psi_surface", "kaehler_matrix"});
    CHECK(r.quadratics.front().gated);
    for (const IdentityReport& a : r.algebra) CHECK(a.max_residual <= 1e-12);
  }
  SUBCASE("static perturbation is reported without gating") {
    SweepResult r = run_harnack_sweep(small("perturbed_sphere", 20));
    REQUIRE_FALSE(r.quadratics.empty());
    CHECK_FALSE(r.quadratics.front().gated);
    CHECK(r.pass());
  }
  SUBCASE("three-dimensional flat chart") {
    SweepResult r = run_harnack_sweep(small("flat_chart_3d", 4));
    CHECK(r.pass());
    REQUIRE(r.algebra.size() == 1);
    CHECK(r.algebra[0].configuration == "flat n=3");
  }
}
