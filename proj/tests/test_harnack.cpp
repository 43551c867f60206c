#include <cmath>
#include <random>

#include "doctest.h"
#include "lyhflow/errors.hpp"
#include "lyhflow/geometry.hpp"
#include "lyhflow/harnack.hpp"

using namespace lyh;

namespace {

const DerivativeStencil kStencil{1e-3, 1e-3, 4};

std::vector<ChartPoint> points(const MetricFamily& fam, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ChartPoint> out;
  for (int s = 0; s < count; ++s) {
    std::vector<double> ux(fam.dimension);
    const double ut = u(rng);
    for (auto& v : ux) v = u(rng);
    out.push_back(fam.sample(ut, ux));
  }
  return out;
}

Tensor random_two_form(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      t(i, j) = u(rng);
      t(j, i) = -t(i, j);
    }
  return t;
}

Tensor random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(n, 1);
  for (auto& v : t.a) v = u(rng);
  return t;
}

double norm2(const Tensor& g, const Tensor& w) {
  double s = 0.0;
  for (int i = 0; i < g.d; ++i)
    for (int j = 0; j < g.d; ++j) s += g(i, j) * w(i) * w(j);
  return s;
}

Tensor lower(const Tensor& g, const Tensor& v) {
  Tensor out(g.d, 1);
  for (int i = 0; i < g.d; ++i)
    for (int j = 0; j < g.d; ++j) out(i) += g(i, j) * v(j);
  return out;
}

const char* kFlows[] = {"cigar", "round_sphere_2d", "round_sphere_polar"};

}  // namespace

TEST_CASE("hamilton quadratic") {
  std::mt19937_64 rng(11);
  SUBCASE("flat plane") {
    const MetricFamily& fam = catalog("flat_gaussian_expanding");
    for (const ChartPoint& p : points(fam, 3, 5)) {
      MPZ z = hamilton_mpz(fam, p, random_two_form(2, rng), random_vector(2, rng));
      CHECK(max_abs(z.m) == 0.0);
      CHECK(max_abs(z.p) == 0.0);
      CHECK(z.z == 0.0);
    }
  }
  SUBCASE("shrinking sphere with U = 0") {
    const MetricFamily& fam = catalog("round_sphere_2d");
    for (const ChartPoint& p : points(fam, 5, 7)) {
      const double t = p.time;
      const double R = 2.0 / (1.0 - 2.0 * t);
      const double dR = R * R;
      Tensor w = random_vector(2, rng);
      MPZ z = hamilton_mpz(fam, p, Tensor(2, 2), w);
      const double expect = (dR + R / t) * norm2(metric_at(fam, t, p.coords), w) / 4.0;
      CHECK(z.z == doctest::Approx(expect).epsilon(1e-12));
      CHECK(z.z > 0.0);
    }
  }
  SUBCASE("cigar is sharp along V") {
    const MetricFamily& fam = catalog("cigar");
    for (const ChartPoint& p : points(fam, 6, 9)) {
      LocalData d = local_data(fam, p);
      JetVec xs;
      for (double v : p.coords) xs.emplace_back(v);
      JetVec vj = fam.v_lower(Jet(p.time), xs);
      Tensor v(2, 1);
      for (int i = 0; i < 2; ++i) v(i) = vj[i].value();
      Tensor w = random_vector(2, rng);
      Tensor u = soliton_two_form(v, w, d.g);
      const double z = z_quadratic(d, false).evaluate(u, w);
      CHECK(std::abs(z) <= 1e-12 * (1.0 + z_quadratic(d, false).scale()));
      // with the R/2t term the same argument is not a null direction
      CHECK(std::abs(z_quadratic(d, true).evaluate(u, w)) > 1e-6);
    }
  }
  SUBCASE("t <= 0 is rejected") {
    const MetricFamily& fam = catalog("round_sphere_polar");
    ChartPoint p = fam.sample(0.0, {0.5, 0.5});
    CHECK(p.time == 0.0);
    CHECK_THROWS_AS(hamilton_mpz(fam, p, Tensor(2, 2), Tensor(2, 1)), DomainError);
    CHECK_NOTHROW(hamilton_mpz(fam, p, Tensor(2, 2), Tensor(2, 1), false));
  }
}

TEST_CASE("vee and D_t") {
  SUBCASE("elementary vee on a 1-form") {
    Tensor th(3, 1);
    th(0) = 1.5;
    th(1) = -2.0;
    th(2) = 0.25;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Tensor v = vee_elementary(th, a, b);
        for (int c = 0; c < 3; ++c) CHECK(v(c) == (a == c ? th(b) : 0.0));
      }
  }
  SUBCASE("rank limit") {
    CHECK_THROWS_AS(vee_elementary(Tensor(2, 5), 0, 1), UnsupportedError);
  }
  SUBCASE("D_t g = 0 on flow solutions") {
    JetTensorField metric = [](const Jet&, const JetVec&, const JTensor& g) { return g; };
    for (const char* f : kFlows) {
      const MetricFamily& fam = catalog(f);
      for (const ChartPoint& p : points(fam, 4, 13)) {
        DtValues d = dt_derivative(fam, p, metric);
        CHECK(max_abs(d.dt) <= 1e-12 * (1.0 + max_abs(d.vee)));
        CHECK(max_abs(d.vee) > 0.0);
      }
    }
  }
  SUBCASE("D_t on a scalar is the time derivative") {
    const MetricFamily& fam = catalog("round_sphere_2d");
    JetTensorField scalar = [](const Jet& t, const JetVec&, const JTensor&) {
      JTensor s(2, 0);
      s.a.assign(1, 2.0 / (1.0 - 2.0 * t));
      return s;
    };
    ChartPoint p = fam.sample(0.5, {0.5, 0.5});
    DtValues d = dt_derivative(fam, p, scalar);
    const double R = 2.0 / (1.0 - 2.0 * p.time);
    CHECK(d.dt.a[0] == doctest::Approx(R * R).epsilon(1e-13));
  }
}

TEST_CASE("hamilton evolution equations") {
  SUBCASE("flat") {
    const MetricFamily& fam = catalog("flat_torus");
    HamiltonResiduals h = hamilton_evolution_residuals(fam, fam.sample(0.3, {0.4, 0.6}));
    CHECK(h.r_max == 0.0);
    CHECK(h.p_max == 0.0);
    CHECK(h.m_max == 0.0);
  }
  SUBCASE("flow solutions") {
    for (const char* f : kFlows) {
      const std::string name = f;
      CAPTURE(name);
      const MetricFamily& fam = catalog(f);
      for (const ChartPoint& p : points(fam, 4, 17)) {
        if (p.time <= 1e-3) continue;
        HamiltonResiduals h = hamilton_evolution_residuals(fam, p);
        const double tol = 1e-11 * (1.0 + h.scale);
        CHECK(h.scale > 0.05);
        CHECK(h.r_max <= tol);
        CHECK(h.p_max <= tol);
        // M carries sixth derivatives of the metric; roundoff in the jet
        // coefficients sits near 1e-10 in stereographic charts
        CHECK(h.m_max <= 1e-8 * (1.0 + h.scale));
        EquivalenceReport e = evolution_equivalence(fam, p, kStencil);
        CHECK(e.spacetime_max <= 1e-7 * (1.0 + e.scale));
        CHECK(e.mismatch <= 1e-7 * (1.0 + e.scale));
      }
    }
  }
  SUBCASE("static metric is not a solution") {
    const MetricFamily& fam = catalog("perturbed_sphere");
    HamiltonResiduals h = hamilton_evolution_residuals(fam, fam.sample(0.5, {0.5, 0.5}));
    CHECK(std::max({h.r_max, h.p_max, h.m_max}) > 1e-3);
  }
}

TEST_CASE("space-time dictionary") {
  std::mt19937_64 rng(23);
  for (const char* f : kFlows) {
    const std::string name = f;
    CAPTURE(name);
    const MetricFamily& fam = catalog(f);
    for (const ChartPoint& p : points(fam, 4, 29)) {
      if (p.time <= 1e-3) continue;
      DictionaryReport exact = rpm_dictionary(fam, p);
      const double tol = 1e-12 * (1.0 + exact.scale);
      CHECK(exact.riemann <= tol);
      CHECK(exact.p <= tol);
      CHECK(exact.m <= tol);
      DictionaryReport fd = rpm_dictionary(fam, p, &kStencil);
      CHECK(std::max({fd.riemann, fd.p, fd.m}) <= 1e-7 * (1.0 + fd.scale));

      Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
      const double z = hamilton_mpz(fam, p, u, w).z;
      CHECK(z_spacetime(fam, p, u, w) == doctest::Approx(z).epsilon(1e-11));
      CHECK(z_spacetime(fam, p, u, w, &kStencil) == doctest::Approx(z).epsilon(1e-7));
    }
  }
}

TEST_CASE("steady soliton annihilates the space-time curvature") {
  const MetricFamily& fam = catalog("cigar");
  for (const ChartPoint& p : points(fam, 8, 31)) {
    SolitonReport r = steady_soliton_relations(fam, p);
    const double tol = 1e-12 * (1.0 + r.scale);
    CHECK(r.annihilation <= tol);
    CHECK(r.p_relation <= tol);
    CHECK(r.m_relation <= tol);
  }
  CHECK_THROWS_AS(steady_soliton_relations(catalog("round_sphere_2d"), catalog("round_sphere_2d").sample(0.5, {0.5, 0.5})),
                  ScopeError);
}

TEST_CASE("assumptions and their space-time form") {
  SUBCASE("zero data") {
    AssumptionPointData d;
    d.n = 2;
    d.t = 0.8;
    d.g = Tensor(2, 2);
    d.g(0, 0) = d.g(1, 1) = 1.0;
    d.ric = Tensor(2, 2);
    d.grad_r = d.div_ric = d.w = d.dt_w = d.lap_w = Tensor(2, 1);
    d.nabla_w = d.u = d.dt_u = d.lap_u = Tensor(2, 2);
    d.nabla_u = Tensor(2, 3);
    AssumptionEquivalence e = assumption_equivalence(d);
    CHECK(e.direct_max == 0.0);
    CHECK(e.spacetime_max == 0.0);
  }
  SUBCASE("data solving the assumptions") {
    for (int n : {2, 3})
      for (uint64_t seed = 1; seed <= 5; ++seed) {
        AssumptionEquivalence e = assumption_equivalence(consistent_assumption_data(n, 0.3 + 0.2 * seed, seed));
        CHECK(e.direct_max <= 1e-14);
        CHECK(e.spacetime_max <= 1e-14);
        CHECK(e.reconstruction_error <= 1e-14);
      }
  }
  SUBCASE("perturbing the parallel condition on W") {
    AssumptionPointData d = consistent_assumption_data(3, 0.6, 41);
    d.nabla_w(0, 1) += 0.1;
    AssumptionEquivalence e = assumption_equivalence(d);
    CHECK(max_abs(e.direct.a3) == doctest::Approx(0.1));
    CHECK(max_abs(e.direct.a1) <= 1e-14);
    CHECK(max_abs(e.direct.a2) <= 1e-14);
    CHECK(max_abs(e.direct.a4) <= 1e-14);
    CHECK(max_abs(e.spacetime.covar_k0j) == doctest::Approx(0.1 / 1.2));
    CHECK(max_abs(e.spacetime.heat_ij) > 1e-3);  // carries (t Rc + g/2) nabla W
    CHECK(max_abs(e.spacetime.heat_0j) <= 1e-14);
    CHECK(max_abs(e.spacetime.covar_kij) <= 1e-14);
    CHECK(e.reconstruction_error <= 1e-14);

    // a pure-trace perturbation only shows in the covariant 0j rows
    AssumptionPointData c = consistent_assumption_data(3, 0.6, 41);
    for (int k = 0; k < 3; ++k) c.nabla_w(k, k) += 0.1;
    AssumptionEquivalence f = assumption_equivalence(c);
    CHECK(max_abs(f.spacetime.covar_k0j) > 1e-3);
    CHECK(max_abs(f.spacetime.heat_ij) <= 1e-14);
    CHECK(max_abs(f.spacetime.heat_0j) <= 1e-14);
    CHECK(max_abs(f.spacetime.covar_kij) <= 1e-14);
  }
  SUBCASE("shape errors") {
    AssumptionPointData d = consistent_assumption_data(2, 0.5, 3);
    d.nabla_u = Tensor(2, 2);
    CHECK_THROWS_AS(assumption_equivalence(d), ShapeError);
  }
}

TEST_CASE("form-coupled quadratics") {
  std::mt19937_64 rng(43);
  SUBCASE("Psi with no forms is Rm(U,U)") {
    const MetricFamily& fam = catalog("round_sphere_2d");
    for (const ChartPoint& p : points(fam, 3, 47)) {
      Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
      LocalData d = local_data(fam, p);
      HarnackQuadratic rm(d.g);
      rm.rm = d.rm;
      CHECK(psi_matrix(fam, FormPair{}, p, u, w) == doctest::Approx(rm.evaluate(u, w)).epsilon(1e-14));
      // round sphere: Rm(U,U) = R |U|^2 with the full contraction
      CHECK(rm.evaluate(u, w) == doctest::Approx(d.scalar * two_form_norm2(u, d.g)).epsilon(1e-12));
    }
  }
  SUBCASE("surface system") {
    for (const char* f : {"flat_torus", "cigar", "round_sphere_2d"}) {
      const std::string name = f;
      CAPTURE(name);
      const MetricFamily& fam = catalog(f);
      FormPair fp = make_form_pair(fam, FormKind::surface_phi_f);
      for (const ChartPoint& p : points(fam, 3, 53)) {
        LocalData d = local_data(fam, p, fp);
        Jet tj = Jet::variable(3, 3, 0, p.time);
        JetVec xj{Jet::variable(3, 3, 1, p.coords[0]), Jet::variable(3, 3, 2, p.coords[1])};
        Jet ph = fam.phi(tj, xj), ff = fam.f(tj, xj);
        SurfacePoint sp;
        sp.g = d.g;
        sp.scalar = d.scalar;
        sp.phi = ph.value();
        sp.grad_phi = Tensor(2, 1);
        sp.grad_phi(0) = ph.partial({1});
        sp.grad_phi(1) = ph.partial({2});
        sp.dt_f = ff.partial({0});
        sp.hess_f = Tensor(2, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) sp.hess_f(i, j) = -0.5 * d.nabla_e(i, j);
        Tensor u = random_two_form(2, rng), w = random_vector(2, rng), x = random_vector(2, rng);
        const double psi = psi_quadratic(d).evaluate(u, w);
        CHECK(surface_matrix_quadratic(sp).evaluate(u, w) == doctest::Approx(psi).epsilon(1e-12));
        // V = 2JX doubles the displayed trace
        Tensor jx = rotate(d, x);
        for (auto& v : jx.a) v *= 2.0;
        CHECK(psi_trace(d, lower(d.g, jx)) == doctest::Approx(2.0 * surface_trace(sp, x)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("scaling of Psi") {
    const MetricFamily& fam = catalog("round_sphere_2d");
    FormPair fp = make_form_pair(fam, FormKind::surface_phi_f);
    for (const ChartPoint& p : points(fam, 3, 59)) {
      Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
      for (double lam : {0.3, 2.0, 7.5}) {
        Tensor wl = w;
        for (auto& v : wl.a) v *= lam;
        const double lhs = psi_matrix(fam, scaled_forms(fp, lam), p, u, w);
        CHECK(lhs == doctest::Approx(psi_matrix(fam, fp, p, u, wl)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("trace consistency") {
    for (const char* f : {"flat_torus", "cigar", "round_sphere_2d"})
      for (FormKind k : {FormKind::none, FormKind::surface_phi_f, FormKind::kaehler_full, FormKind::zero_A}) {
        const MetricFamily& fam = catalog(f);
        LocalData d = local_data(fam, fam.sample(0.4, {0.3, 0.6}), make_form_pair(fam, k));
        Tensor v = random_vector(2, rng);
        CHECK(psi_trace(d, v) == doctest::Approx(psi_trace_by_frame(d, v)).epsilon(1e-12));
      }
    const MetricFamily& torus = catalog("flat_torus");
    CHECK(psi_trace(local_data(torus, torus.sample(0.5, {0.5, 0.5})), Tensor(2, 1)) == 0.0);
  }
  SUBCASE("Kaehler choice") {
    for (const char* f : {"round_sphere_2d", "cigar"}) {
      const MetricFamily& fam = catalog(f);
      for (const ChartPoint& p : points(fam, 3, 61)) {
        LocalData d = local_data(fam, p, make_form_pair(fam, FormKind::kaehler_full));
        Tensor x = random_vector(2, rng), u = random_two_form(2, rng), w = random_vector(2, rng);
        Tensor v = rotate(d, x);
        for (auto& c : v.a) c *= d.t;
        CHECK(psi_trace(d, lower(d.g, v)) == doctest::Approx(kaehler_trace(d, x)).epsilon(1e-12));
        Tensor wt = w;
        for (auto& c : wt.a) c /= d.t;
        CHECK(kaehler_matrix_quadratic(d).evaluate(u, w) ==
              doctest::Approx(psi_quadratic(d).evaluate(u, wt)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("full quadratic Phi") {
  std::mt19937_64 rng(67);
  SUBCASE("t = 0 leaves mu^2 |W|^2") {
    const MetricFamily& fam = catalog("round_sphere_polar");
    ChartPoint p = fam.sample(0.0, {0.4, 0.7});
    Tensor w = random_vector(2, rng);
    CHECK(phi_full(fam, FormPair{}, p, Tensor(2, 2), w) ==
          doctest::Approx(0.25 * norm2(metric_at(fam, 0.0, p.coords), w)).epsilon(1e-14));
  }
  SUBCASE("agrees with the space-time curvature") {
    for (const char* f : {"flat_torus", "cigar", "round_sphere_2d"})
      for (FormKind k : {FormKind::none, FormKind::surface_phi_f, FormKind::kaehler_full, FormKind::zero_A}) {
        const std::string name = f;
        CAPTURE(name);
        const MetricFamily& fam = catalog(f);
        FormPair fp = make_form_pair(fam, k);
        for (const ChartPoint& p : points(fam, 2, 71)) {
          Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
          const double phi = phi_full(fam, fp, p, u, w);
          const double sc = 1.0 + phi_full_quadratic(local_data(fam, p, fp)).scale();
          CHECK(std::abs(phi_full_spacetime(fam, fp, p, u, w) - phi) <= 1e-11 * sc);
          CHECK(std::abs(phi_full_spacetime(fam, fp, p, u, w, &kStencil) - phi) <= 1e-7 * sc);
        }
      }
  }
  SUBCASE("scaling limit recovers Psi") {
    for (const char* f : {"flat_torus", "round_sphere_2d", "cigar"}) {
      const MetricFamily& fam = catalog(f);
      FormPair fp = make_form_pair(fam, FormKind::surface_phi_f);
      for (const ChartPoint& p : points(fam, 2, 73)) {
        Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
        const double psi = psi_matrix(fam, fp, p, u, w);
        const double lim = phi_scaling_limit(fam, fp, p, u, w);
        CHECK(std::abs(lim - psi) <= 1e-9 * (1.0 + std::abs(psi)));
        // the raw value at lambda = 100 is only O(1/lambda) close
        Tensor wl = w;
        for (auto& c : wl.a) c /= 100.0;
        const double raw = phi_full(fam, scaled_forms(fp, 100.0), p, u, wl);
        CHECK(std::abs(raw - psi) < 0.1 * (1.0 + std::abs(psi)));
      }
    }
  }
}

TEST_CASE("minimum eigenvalue") {
  std::mt19937_64 rng(79);
  SUBCASE("zero form") {
    Tensor g(3, 2);
    for (int i = 0; i < 3; ++i) g(i, i) = 2.0;
    EigenSample e = min_eigenvalue(HarnackQuadratic(g));
    CHECK(e.min_eigenvalue == 0.0);
    CHECK(e.eigenvalues.size() == 6);
  }
  SUBCASE("surface Psi, constant phi and f") {
    for (auto [R, phi] : std::vector<std::pair<double, double>>{{3.0, 1.2}, {0.5, 2.0}, {1.0, 1.0}}) {
      SurfacePoint sp;
      sp.g = Tensor(2, 2);
      sp.g(0, 0) = 2.0;
      sp.g(1, 1) = 0.5;
      sp.g(0, 1) = sp.g(1, 0) = 0.3;
      sp.scalar = R;
      sp.phi = phi;
      sp.grad_phi = Tensor(2, 1);
      sp.hess_f = Tensor(2, 2);
      EigenSample e = min_eigenvalue(surface_matrix_quadratic(sp));
      CHECK(e.min_eigenvalue == doctest::Approx(std::min(R, phi * phi)).epsilon(1e-12));
      CHECK(e.u_norm * e.u_norm + e.w_norm * e.w_norm == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("round sphere Z is positive definite") {
    const MetricFamily& fam = catalog("round_sphere_2d");
    for (const ChartPoint& p : points(fam, 4, 83)) {
      HarnackQuadratic q = z_quadratic(local_data(fam, p));
      EigenSample e = min_eigenvalue(q);
      CHECK(e.min_eigenvalue > 0.0);
      // the minimum bounds every normalized value
      for (int k = 0; k < 20; ++k) {
        Tensor u = random_two_form(2, rng), w = random_vector(2, rng);
        const double nn = two_form_norm2(u, q.g) + norm2(q.g, w);
        CHECK(e.min_eigenvalue <= q.evaluate(u, w) / nn + 1e-12);
      }
      CHECK(q.evaluate(e.u, e.w) == doctest::Approx(e.min_eigenvalue).epsilon(1e-10));
    }
  }
  SUBCASE("cigar Z is degenerate along the soliton direction") {
    const MetricFamily& fam = catalog("cigar");
    for (const ChartPoint& p : points(fam, 3, 89)) {
      HarnackQuadratic q = z_quadratic(local_data(fam, p), false);
      EigenSample e = min_eigenvalue(q);
      CHECK(std::abs(e.min_eigenvalue) <= 1e-12 * (1.0 + q.scale()));
    }
  }
  SUBCASE("sign is invariant under the (A, E) scaling") {
    const MetricFamily& fam = catalog("flat_torus");
    FormPair fp = make_form_pair(fam, FormKind::surface_phi_f);
    for (const ChartPoint& p : points(fam, 4, 97)) {
      const double base = min_eigenvalue(psi_quadratic(local_data(fam, p, fp))).min_eigenvalue;
      for (double lam : {0.5, 4.0}) {
        const double scaled = min_eigenvalue(psi_quadratic(local_data(fam, p, scaled_forms(fp, lam)))).min_eigenvalue;
        if (std::abs(base) > 1e-9) CHECK((scaled > 0.0) == (base > 0.0));
      }
    }
  }
}

TEST_CASE("F and N on surfaces") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor g(2, 2);
  g(0, 0) = 1.3;
  g(1, 1) = 0.8;
  g(0, 1) = g(1, 0) = 0.2;
  SUBCASE("constants") {
    FNPoint p;
    p.g = g;
    p.scalar = 2.0;
    p.grad_r = p.grad_phi = Tensor(2, 1);
    p.hess_phi = Tensor(2, 2);
    p.phi = 1.7;
    FNValue v = fn_monitor(p);
    CHECK(v.defined);
    CHECK(v.f == doctest::Approx(1.7 * 1.7));
    CHECK(v.n == doctest::Approx(0.0));
  }
  SUBCASE("N is non-negative for consistent data") {
    Tensor gi = spd_inverse(g);
    for (int k = 0; k < 200; ++k) {
      FNPoint p;
      p.g = g;
      p.scalar = 0.1 + std::abs(u(rng)) * 3.0;
      p.grad_r = random_vector(2, rng);
      p.grad_phi = random_vector(2, rng);
      p.phi = u(rng);
      p.hess_phi = Tensor(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) p.hess_phi(i, j) = p.hess_phi(j, i) = u(rng);
      p.lap_phi = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) p.lap_phi += gi(i, j) * p.hess_phi(i, j);
      p.lap_f = u(rng);
      FNValue v = fn_monitor(p);
      CHECK(v.n >= -1e-10 * (1.0 + p.scalar * p.scalar));
    }
  }
  SUBCASE("Laplacian inconsistent with the Hessian") {
    FNPoint p;
    p.g = g;
    p.scalar = 1.0;
    p.grad_r = p.grad_phi = Tensor(2, 1);
    p.hess_phi = Tensor(2, 2);
    p.phi = 0.5;
    p.lap_phi = 0.4;
    CHECK(fn_monitor(p).n < -0.1);
  }
  SUBCASE("undefined where R is small") {
    FNPoint p;
    p.g = g;
    p.scalar = 1e-8;
    p.grad_r = p.grad_phi = Tensor(2, 1);
    p.hess_phi = Tensor(2, 2);
    CHECK_FALSE(fn_monitor(p).defined);
  }
}

TEST_CASE("monotone consequence on the shrinking sphere") {
  const MetricFamily& fam = catalog("round_sphere_2d");
  double prev = -1e300;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.06 + 0.0145 * k;
    LocalData d = local_data(fam, ChartPoint{{0.3, -0.2}, t, ""});
    const double v = t * (t * d.scalar + 0.5 * d.n);
    CHECK(v >= prev);
    prev = v;
    CHECK(kaehler_trace(d, Tensor(2, 1)) >= 0.0);
  }
}
