#include <cmath>
#include <random>

#include "doctest.h"
#include "lyhflow/errors.hpp"
#include "lyhflow/spacetime.hpp"

using namespace lyh;

namespace {

struct Config {
  std::string family;
  bool rescaled;
  FormKind forms;
  double c_term;
};

SpacetimeConnection make(const Config& k) {
  const MetricFamily& fam = catalog(k.family);
  return build_connection(fam, k.rescaled ? 0.5 : 0.0, k.c_term, make_form_pair(fam, k.forms), k.rescaled);
}

std::vector<Coord> samples(const SpacetimeConnection& c, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Coord> out;
  for (int s = 0; s < count; ++s) {
    std::vector<double> ux(c.n());
    const double ut = u(rng);
    for (auto& v : ux) v = u(rng);
    out.push_back(picture_coord(c, c.base->sample(ut, ux)));
  }
  return out;
}

std::vector<Config> surface_configs() {
  std::vector<Config> out;
  for (const char* f : {"flat_torus", "cigar", "round_sphere_2d"})
    for (bool r : {false, true}) {
      const double mu = r ? 0.5 : 0.0;
      out.push_back({f, r, FormKind::none, 0.0});
      out.push_back({f, r, FormKind::surface_phi_f, mu});
    }
  return out;
}

}  // namespace

TEST_CASE("connection coefficients on the flat torus") {
  const MetricFamily& fam = catalog("flat_torus");
  for (double C : {0.0, 0.3}) {
    SpacetimeConnection c = build_connection(fam, 0.5, C, {}, true);
    Tensor G = gamma_tilde(c, picture_coord(c, fam.sample(0.5, {0.3, 0.6})));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double expect = 0.0;
          if (k >= 1 && ((i == k && j == 0) || (j == k && i == 0))) expect = -0.5;
          if (k == 0 && i == 0 && j == 0) expect = -(0.5 + C);
          CHECK(G(k, i, j) == doctest::Approx(expect).epsilon(1e-14));
        }
  }
}

TEST_CASE("unrescaled connection carries minus the Ricci tensor") {
  const MetricFamily& fam = catalog("cigar");
  SpacetimeConnection c = build_connection(fam, 0.0, 0.0, {}, false);
  for (const Coord& y : samples(c, 10, 11)) {
    Tensor G = gamma_tilde(c, y);
    SpacetimeJets S = spacetime_jets(c, y, 3, false);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) CHECK(G(k + 1, i + 1, 0) == doctest::Approx(-S.ric_mixed(i, k).value()));
  }
}

TEST_CASE("connection configuration gates") {
  const MetricFamily& fam = catalog("round_sphere_2d");
  FormPair sym;
  sym.provenance = FormKind::general;
  sym.a_form = [](const Jet&, const JetVec& x, const JTensor&) {
    JTensor a(2, 2);
    a(0, 1) = x[0];
    a(1, 0) = x[0];
    return a;
  };
  sym.e_form = [](const Jet&, const JetVec&, const JTensor&) { return JTensor(2, 1); };
  CHECK_THROWS_AS(build_connection(fam, 0.5, 0.5, sym, true), InvariantError);
  CHECK_THROWS_AS(build_connection(fam, 0.3, 0.0, {}, true), ConfigError);
  CHECK_THROWS_AS(build_connection(fam, 0.5, 0.0, {}, false), ConfigError);
  CHECK_THROWS_AS(build_connection(fam, std::nan(""), 0.0, {}, false), ConfigError);
  SpacetimeConnection c = build_connection(fam, 0.0, 0.0, {}, false);
  Coord far{0.1, 2.99, 0.0, 0.0};
  CHECK_THROWS_AS(gamma_tilde(c, far), DomainError);
}

TEST_CASE("compatibility with the degenerate metric") {
  const DerivativeStencil s;
  {
    SpacetimeConnection c = make({"flat_torus", false, FormKind::none, 0.7});
    for (const Coord& y : samples(c, 5, 1)) CHECK(compatibility_residual(c, y, s) == 0.0);
    SpacetimeConnection r = make({"flat_torus", true, FormKind::none, 0.7});
    for (const Coord& y : samples(r, 5, 1)) CHECK(compatibility_residual(r, y, s) <= 1e-12);
  }
  {
    SpacetimeConnection c = make({"cigar", false, FormKind::none, 0.0});
    for (const Coord& y : samples(c, 10, 2)) CHECK(compatibility_residual(c, y, s) <= 1e-7);
  }
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 10, 2))
      CHECK(compatibility_residual(c, y, s) <= 1e-7 * std::max(1.0, max_abs(gtilde_inverse(c, y))));
  }
  SpacetimeConnection bad = make({"round_sphere_2d", true, FormKind::none, 0.0});
  bad.corruption = Corruption::flip_c2;
  const Coord y = samples(bad, 1, 3)[0];
  CHECK(compatibility_residual(bad, y, s) > 0.1);
}

TEST_CASE("direct and closed-form curvature agree") {
  const DerivativeStencil s;
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 12, 5)) {
      SpacetimeCurvature d = curvature_direct(c, y, s);
      SpacetimeCurvature e = curvature_closed_form(c, y);
      const double scale = std::max(1.0, max_abs(e.up));
      CHECK(max_abs_diff(d.up, e.up) <= 1e-6 * scale);
      CHECK(max_abs_diff(d.ricci, e.ricci) <= 1e-6 * scale);
      CHECK(max_abs_diff(ricci_contraction(e.up), e.ricci) <= 1e-10 * scale);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int kk = 0; kk < 3; ++kk) {
            CHECK(d.up(0, i, j, kk) == 0.0);
            CHECK(std::abs(d.up(1, i, j, kk) + d.up(1, j, i, kk)) <= 1e-12 * scale);
            CHECK(e.low(i, j, 0, 0) == 0.0);
          }
    }
  }
}

TEST_CASE("curvature examples") {
  const DerivativeStencil s;
  SUBCASE("flat torus is flat") {
    SpacetimeConnection c = make({"flat_torus", true, FormKind::none, 0.0});
    for (const Coord& y : samples(c, 4, 8)) CHECK(max_abs(curvature_direct(c, y, s).up) == 0.0);
  }
  SUBCASE("round sphere in the rescaled picture") {
    SpacetimeConnection c = make({"round_sphere_2d", true, FormKind::none, 0.0});
    for (const Coord& y : samples(c, 6, 9)) {
      SpacetimeCurvature d = curvature_direct(c, y, s);
      SpacetimeJets S = spacetime_jets(c, y, 4, false);
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(d.ricci(0, i + 1)) <= 1e-7);
        for (int j = 0; j < 2; ++j) CHECK(d.ricci(i + 1, j + 1) == doctest::Approx(S.ric_bar(i, j).value()).epsilon(1e-7));
      }
      // spatial block of the lowered tensor is the ordinary one divided by t
      const ChartPoint p = chart_point(c, y);
      Tensor g = metric_at(*c.base, p.time, p.coords);
      Tensor rl = lower_riemann(riemann(*c.base, p, s), g);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              CHECK(d.low(i + 1, j + 1, k + 1, l + 1) == doctest::Approx(rl(i, j, k, l) / p.time).epsilon(1e-6));
    }
  }
  SUBCASE("gradient B on the flat torus enters R_00 as its codifferential") {
    const MetricFamily& fam = catalog("flat_torus");
    SpacetimeConnection c = build_connection(fam, 0.0, 0.0, {}, false);
    c.bbar_override = [](const PictureJets& pj) {
      JTensor b(2, 1);
      Jet h = sin(pj.x[0]) * cos(2.0 * pj.x[1]);
      b(0) = h.d(1);
      b(1) = h.d(2);
      return b;
    };
    for (const Coord& y : samples(c, 5, 10)) {
      SpacetimeCurvature d = curvature_direct(c, y, s);
      const double lap = -5.0 * std::sin(y[1]) * std::cos(2.0 * y[2]);
      CHECK(d.ricci(0, 0) == doctest::Approx(-lap).epsilon(1e-7));
      CHECK(curvature_closed_form(c, y).ricci(0, 0) == doctest::Approx(-lap).epsilon(1e-12));
    }
  }
  SUBCASE("lowering rule") {
    Tensor up(3, 4);
    Tensor g(2, 2);
    g(0, 0) = g(1, 1) = 1.0;
    CHECK(max_abs(lower_curvature(up, g)) == 0.0);
  }
}

TEST_CASE("Bianchi identities") {
  const DerivativeStencil s;
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 4, 13)) {
      BianchiResiduals b = bianchi_residuals(c, y, s);
      CHECK(b.first <= 1e-7);
      CHECK(b.second <= 1e-6);
    }
  }
  // the shift enters through terms carrying R^l_ij0, which vanish on the sphere
  SpacetimeConnection bad = make({"cigar", false, FormKind::none, 0.0});
  bad.corruption = Corruption::shift_g000;
  bad.corruption_size = 0.25;
  CHECK(bianchi_residuals(bad, samples(bad, 1, 14)[0], s).second > 1e-3);
}

TEST_CASE("Ricci symmetries") {
  const DerivativeStencil s;
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 4, 17)) {
      RicciSymmetryResiduals r = ricci_symmetry_residuals(c, y, s);
      CHECK(r.crc1 <= 1e-6);
      if (k.forms == FormKind::none) {
        REQUIRE(r.crc2.has_value());
        CHECK(*r.crc2 <= 1e-6);
      } else {
        CHECK(!r.crc2.has_value());
      }
    }
  }
}

TEST_CASE("divergence identity and its trace") {
  const DerivativeStencil s;
  for (const char* f : {"flat_torus", "cigar", "round_sphere_2d"})
    for (bool r : {false, true}) {
      SpacetimeConnection c = make({f, r, FormKind::none, 0.0});
      INFO(c.describe());
      for (const Coord& y : samples(c, 4, 19)) {
        CHECK(divergence_identity_residual(c, y, s) <= 1e-6);
        CHECK(divergence_trace_residual(c, y, s) <= 1e-6);
      }
    }
  SpacetimeConnection a = make({"cigar", true, FormKind::surface_phi_f, 0.5});
  CHECK_THROWS_AS(divergence_identity_residual(a, samples(a, 1, 1)[0], s), ScopeError);
}

TEST_CASE("degenerate Ricci flow") {
  const DerivativeStencil s;
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 4, 23)) CHECK(degenerate_ricci_flow_residual(c, y, s) <= 1e-6);
  }
  SpacetimeConnection off = make({"round_sphere_2d", true, FormKind::surface_phi_f, 0.2});
  CHECK_THROWS_AS(degenerate_ricci_flow_residual(off, samples(off, 1, 1)[0], s), ScopeError);
}

TEST_CASE("curvature evolution") {
  const DerivativeStencil s;
  for (const Config& k : surface_configs()) {
    SpacetimeConnection c = make(k);
    INFO(c.describe());
    for (const Coord& y : samples(c, 2, 29)) {
      EvolutionResidual e = curvature_evolution_residual(c, y, s, EvolutionForm::sharp);
      CHECK(e.max_residual <= 1e-5 * std::max(1.0, e.scale));
      if (k.forms == FormKind::none) {
        EvolutionResidual b = curvature_evolution_residual(c, y, s, EvolutionForm::b_tensor);
        CHECK(b.max_residual <= 1e-5 * std::max(1.0, b.scale));
      }
    }
  }
}

TEST_CASE("pair symmetry defect tracks dA") {
  for (const Config& k : surface_configs()) {
    if (k.forms == FormKind::none) continue;
    SpacetimeConnection c = make(k);
    for (const Coord& y : samples(c, 5, 31)) {
      SymmetryDefects d = symmetry_defects(c, y);
      CHECK(d.first_raw <= 1e-10);
      CHECK(d.second_raw <= 1e-9);
    }
  }
  // C != mu: the second defect is 2 (C - mu) Abar
  SpacetimeConnection c = make({"round_sphere_2d", true, FormKind::surface_phi_f, 0.9});
  for (const Coord& y : samples(c, 5, 37)) {
    SymmetryDefects d = symmetry_defects(c, y);
    CHECK(d.second_raw > 1e-3);
    CHECK(d.second <= 1e-9);
  }
  // a non-closed perturbation in three dimensions
  const MetricFamily& fam = catalog("flat_chart_3d");
  std::vector<double> raws;
  for (double eps : {1e-2, 2e-2}) {
    SpacetimeConnection p = build_connection(fam, 0.0, 0.0, {}, false);
    p.abar_override = [eps](const PictureJets& pj) {
      JTensor a(3, 2);
      a(0, 1) = eps * pj.x[2] * pj.x[2];
      a(1, 0) = -a(0, 1);
      return a;
    };
    const Coord y = samples(p, 1, 41)[0];
    SymmetryDefects d = symmetry_defects(p, y);
    CHECK(d.first <= 1e-12);
    CHECK(d.d_abar > 0.0);
    CHECK(d.first_raw == doctest::Approx(d.d_abar).epsilon(1e-10));
    raws.push_back(d.first_raw);
  }
  CHECK(raws[1] == doctest::Approx(2.0 * raws[0]).epsilon(1e-10));
}

TEST_CASE("quadratic form") {
  SpacetimeConnection c = make({"round_sphere_2d", true, FormKind::surface_phi_f, 0.5});
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const Coord& y : samples(c, 5, 47)) {
    SpacetimeCurvature e = curvature_closed_form(c, y);
    Tensor U(2, 2), W(2, 1), W2(2, 1);
    U(0, 1) = u(rng);
    U(1, 0) = -U(0, 1);
    W(0) = u(rng);
    W(1) = u(rng);
    W2(0) = u(rng);
    W2(1) = u(rng);
    SpacetimeTwoVector S = lift_two_vector(U, W, LiftConvention::x_tilde, 1.0);
    SpacetimeTwoVector T = lift_two_vector(U, W2, LiftConvention::x_tilde, 1.0);
    CHECK(quadratic_form(e.low, S.components, T.components) ==
          doctest::Approx(quadratic_form(e.low, T.components, S.components)).epsilon(1e-10));
    // spatial-only arguments reduce to the ordinary contraction
    SpacetimeTwoVector Us = lift_two_vector(U, Tensor(2, 1), LiftConvention::x_tilde, 1.0);
    double ordinary = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) ordinary += e.low(i + 1, j + 1, k + 1, l + 1) * U(i, j) * U(l, k);
    CHECK(quadratic_form(e.low, Us.components, Us.components) == doctest::Approx(ordinary));
  }
  CHECK(quadratic_form(Tensor(3, 4), Tensor(3, 2), Tensor(3, 2)) == 0.0);
  Tensor badU(2, 2);
  badU(0, 1) = 1.0;
  CHECK_THROWS_AS(lift_two_vector(badU, Tensor(2, 1), LiftConvention::x_tilde, 1.0), InvariantError);
  CHECK_THROWS_AS(lift_two_vector(Tensor(2, 2), Tensor(2, 1), LiftConvention::t_tilde, 0.0), DomainError);
}

namespace {
Tensor flat_gtilde(int n) {
  Tensor gi(n + 1, 2);
  for (int i = 1; i <= n; ++i) gi(i, i) = 1.0;
  return gi;
}
Tensor basis_form(int dim, int a, int b) {
  Tensor s(dim, 2);
  s(a, b) = 1.0;
  s(b, a) = -1.0;
  return s;
}
Tensor random_curvature_like(int N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  // symmetric matrix on Lambda^2, expanded to four indices
  auto basis = lambda2_basis(N);
  const size_t m = basis.size();
  std::vector<double> M(m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i; j < m; ++j) M[i * m + j] = M[j * m + i] = u(rng);
  Tensor F(N, 4);
  for (size_t x = 0; x < m; ++x)
    for (size_t y = 0; y < m; ++y) {
      auto [a, b] = basis[x];
      auto [c, d] = basis[y];
      const double v = M[x * m + y];
      F(a, b, c, d) += v;
      F(b, a, c, d) -= v;
      F(a, b, d, c) -= v;
      F(b, a, d, c) += v;
    }
  return F;
}
}  // namespace

TEST_CASE("Lambda^2 algebra") {
  Tensor gi = flat_gtilde(2);
  CHECK(lambda2_inner(basis_form(3, 1, 2), basis_form(3, 1, 2), gi) == doctest::Approx(1.0));
  CHECK(lambda2_inner(basis_form(3, 0, 2), basis_form(3, 0, 2), gi) == 0.0);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor gi3 = flat_gtilde(3);
  gi3(1, 2) = gi3(2, 1) = 0.3;
  for (int trial = 0; trial < 10; ++trial) {
    Tensor S(4, 2), T(4, 2);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        S(a, b) = u(rng);
        S(b, a) = -S(a, b);
        T(a, b) = u(rng);
        T(b, a) = -T(a, b);
      }
    CHECK(max_abs(lambda2_bracket(S, S, gi3)) <= 1e-15);
    CHECK(max_abs(lambda2_bracket(S, T, gi3) + lambda2_bracket(T, S, gi3)) <= 1e-14);
    // split form: the 0j part of [X+V, Y+W] is V _| Y - W _| X
    Tensor br = lambda2_bracket(S, T, gi3);
    for (int j = 1; j < 4; ++j) {
      double v = 0.0;
      for (int k = 1; k < 4; ++k)
        for (int l = 1; l < 4; ++l) v += gi3(k, l) * (S(0, k) * T(l, j) - T(0, k) * S(l, j));
      CHECK(br(0, j) == doctest::Approx(v));
    }
  }
  CHECK(structure_constant(1, 2, 1, 0, 0, 2, gi) == 0.0);
  // constants whose metric slots touch the time index vanish
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d)
              if ((b == 0 || c == 0) && (a == 0 || d == 0)) CHECK(structure_constant(i, j, a, b, c, d, gi) == 0.0);
  auto basis = lambda2_basis(3);
  REQUIRE(basis.size() == 3);
  CHECK(basis[0] == std::make_pair(0, 1));
  CHECK(basis[2] == std::make_pair(1, 2));
}

TEST_CASE("sharp and square") {
  std::mt19937_64 rng(59);
  SUBCASE("zero") {
    Tensor gi = flat_gtilde(2);
    SharpSquare z = sharp_and_square(Tensor(3, 4), Tensor(3, 4), gi);
    CHECK(max_abs(z.f_square) == 0.0);
    CHECK(max_abs(z.f_sharp) == 0.0);
  }
  SUBCASE("surface area element") {
    Tensor gi = flat_gtilde(2);
    Tensor F(3, 4);
    const double kappa = 1.7;
    F(1, 2, 1, 2) = F(2, 1, 2, 1) = kappa;
    F(1, 2, 2, 1) = F(2, 1, 1, 2) = -kappa;
    CHECK(max_abs(sharp(F, F, gi)) == 0.0);
    CHECK(max_abs_diff(sharp(F, F, gi), sharp_bruteforce(F, F, gi)) == 0.0);
  }
  SUBCASE("random on three dimensions") {
    Tensor gi = flat_gtilde(3);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    gi(1, 1) = u(rng);
    gi(2, 3) = gi(3, 2) = 0.2;
    for (int trial = 0; trial < 3; ++trial) {
      Tensor F = random_curvature_like(4, rng);
      Tensor G = random_curvature_like(4, rng);
      CHECK(max_abs_diff(sharp(F, G, gi), sharp(G, F, gi)) <= 1e-12);
      CHECK(max_abs_diff(sharp(F, G, gi), sharp_bruteforce(F, G, gi)) <= 1e-12);
    }
  }
  SUBCASE("spatial support with a flat metric matches exactly") {
    Tensor gi = flat_gtilde(3);
    Tensor F = random_curvature_like(4, rng);
    for (size_t f = 0; f < F.size(); ++f) {
      auto ix = F.unflat(f);
      for (int v : ix)
        if (v == 0) F.a[f] = 0.0;
    }
    CHECK(max_abs_diff(sharp(F, F, gi), sharp_bruteforce(F, F, gi)) <= 1e-13);
  }
}

TEST_CASE("lifted covariant derivative") {
  const DerivativeStencil s;
  SUBCASE("zero field on the flat torus") {
    SpacetimeConnection c = make({"flat_torus", true, FormKind::none, 0.0});
    VectorJetField zero = [](const PictureJets&) { return JetVec(2, Jet(0.0)); };
    Tensor d = lifted_covariant_derivative(c, zero, samples(c, 1, 61)[0], s);
    CHECK(d(0, 0) == doctest::Approx(-0.5));
    for (int i = 1; i < 3; ++i)
      for (int j = 1; j < 3; ++j) CHECK(d(i, j) == doctest::Approx(i == j ? -0.5 : 0.0));
  }
  SUBCASE("cigar soliton field is parallel") {
    const MetricFamily& fam = catalog("cigar");
    SpacetimeConnection c = make({"cigar", false, FormKind::none, 0.0});
    VectorJetField V = [&fam](const PictureJets& pj) {
      JetVec vl = fam.v_lower(pj.t, pj.x);
      JTensor gi = spd_inverse(pj.gbar);
      JetVec up(2, Jet(0.0));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) up[i] += gi(i, j) * vl[j];
      return up;
    };
    for (const Coord& y : samples(c, 8, 67)) {
      CHECK(max_abs(lifted_covariant_derivative(c, V, y, s)) <= 1e-7);
      CHECK(max_abs(lifted_covariant_closed(c, V, y)) <= 1e-12);
    }
  }
  SUBCASE("generic field, two paths") {
    for (FormKind fk : {FormKind::none, FormKind::surface_phi_f}) {
      SpacetimeConnection c = make({"round_sphere_2d", true, fk, fk == FormKind::none ? 0.0 : 0.5});
      VectorJetField W = [](const PictureJets& pj) {
        return JetVec{sin(pj.x[1]) * exp(pj.y[0] * 0.3), pj.x[0] * pj.x[1] + pj.y[0]};
      };
      for (const Coord& y : samples(c, 6, 71))
        CHECK(max_abs_diff(lifted_covariant_derivative(c, W, y, s), lifted_covariant_closed(c, W, y)) <= 1e-7);
    }
  }
}
