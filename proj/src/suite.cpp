#include "lyhflow/suite.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "lyhflow/errors.hpp"
#include "lyhflow/harnack.hpp"
#include "lyhflow/soliton.hpp"

namespace lyh {

namespace {

struct Residual {
  double value = 0.0;
  double scale = 0.0;
};

struct Outcome {
  Residual r;
  std::string error;
};

template <class Fn>
std::vector<Outcome> evaluate_all(size_t count, Fn&& fn) {
  std::vector<Outcome> out(count);
  tbb::parallel_for(tbb::blocked_range<size_t>(0, count), [&](const tbb::blocked_range<size_t>& range) {
    for (size_t i = range.begin(); i != range.end(); ++i) {
      try {
        out[i].r = fn(i);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  });
  return out;
}

double tolerance_for(const SuiteConfig& cfg, double scale, double floor) {
  return cfg.tolerance ? *cfg.tolerance : std::max(floor, default_tolerance(scale));
}

// fold per-sample outcomes into one report, in sample order
IdentityReport fold(const std::string& name, const std::string& configuration, const std::vector<Outcome>& out,
                    const SuiteConfig& cfg, double floor = 1e-6) {
  IdentityReport rep;
  rep.identity_name = name;
  rep.configuration = configuration;
  rep.sample_count = static_cast<int>(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    if (!out[i].error.empty()) {
      if (rep.note.empty()) rep.note = "sample " + std::to_string(i) + ": " + out[i].error;
      continue;
    }
    rep.max_residual = std::max(rep.max_residual, out[i].r.value);
    rep.scale = std::max(rep.scale, out[i].r.scale);
    if (std::isnan(out[i].r.value)) rep.max_residual = out[i].r.value;
  }
  rep.tolerance = tolerance_for(cfg, rep.scale, floor);
  rep.pass = rep.note.empty() && rep.max_residual <= rep.tolerance;
  return rep;
}

// order from residuals at (h, h/2) at one interior point
void measure_order(IdentityReport& rep, const std::function<Residual(const DerivativeStencil&)>& at,
                   const SuiteConfig& cfg) {
  double h = cfg.coarse_h;
  for (int attempt = 0; attempt < 4; ++attempt, h *= 0.5) {
    try {
      const DerivativeStencil coarse{h, h, cfg.stencil.order};
      const Residual r1 = at(coarse);
      const Residual r2 = at(coarse.scaled(0.5));
      const double roundoff = 1e-13 * (1.0 + r1.scale);
      if (r1.value <= 100.0 * roundoff) {
        rep.exact = true;
        return;
      }
      // a fine residual at roundoff gives a lower bound on the order
      rep.convergence_order = std::log2(r1.value / std::max(r2.value, roundoff));
      if (*rep.convergence_order < cfg.stencil.order - 0.5) rep.pass = false;
      return;
    } catch (const DomainError&) {
      // stencil left the chart; retry closer in
    } catch (const Error& e) {
      rep.note = std::string("order estimate: ") + e.what();
      rep.pass = false;
      return;
    }
  }
  rep.note = "no admissible coarse step for the order estimate";
  rep.pass = false;
}

Tensor spatial_curvature_like(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto basis = lambda2_basis(dim);
  const size_t m = basis.size();
  std::vector<double> M(m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i; j < m; ++j) M[i * m + j] = M[j * m + i] = u(rng);
  Tensor F(dim, 4);
  for (size_t x = 0; x < m; ++x)
    for (size_t y = 0; y < m; ++y) {
      auto [a, b] = basis[x];
      auto [c, d] = basis[y];
      if (a == 0 || c == 0) continue;  // no time slots
      const double v = M[x * m + y];
      F(a, b, c, d) += v;
      F(b, a, c, d) -= v;
      F(a, b, d, c) -= v;
      F(b, a, d, c) += v;
    }
  return F;
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

double norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.a) s += v * v;
  return std::sqrt(s);
}

// ---- identity suite checks
struct ConnSpec {
  double mu;
  FormKind forms;
};

using ConnEval = std::function<Residual(const SpacetimeConnection&, const Coord&, const DerivativeStencil&)>;

struct Check {
  std::string name;
  ConnEval eval;
  bool exact_path = false;
  std::function<bool(const MetricFamily&, const ConnSpec&)> applies;
  // third-derivative identities lose more digits to roundoff at small h
  double tol_floor = 1e-6;
};

bool always(const MetricFamily&, const ConnSpec&) { return true; }
bool no_forms(const MetricFamily&, const ConnSpec& k) { return k.forms == FormKind::none; }
bool with_forms(const MetricFamily&, const ConnSpec& k) { return k.forms != FormKind::none; }
bool hamilton_case(const MetricFamily& f, const ConnSpec& k) {
  return k.mu == 0.5 && k.forms == FormKind::none && f.dimension == 2 && f.solves_flow;
}

double curvature_scale(const SpacetimeConnection& c, const Coord& y) {
  return max_abs(curvature_closed_form(c, y).up);
}

std::vector<Check> identity_checks() {
  std::vector<Check> out;
  out.push_back({"compatibility",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{compatibility_residual(c, y, s), max_abs(gtilde_inverse(c, y))};
                 },
                 false, always});
  out.push_back({"curvature_closed_form",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   SpacetimeCurvature e = curvature_closed_form(c, y);
                   return Residual{max_abs_diff(curvature_direct(c, y, s).up, e.up), max_abs(e.up)};
                 },
                 false, always});
  out.push_back({"bianchi_first",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{bianchi_residuals(c, y, s).first, curvature_scale(c, y)};
                 },
                 false, always});
  out.push_back({"bianchi_second",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{bianchi_residuals(c, y, s).second, curvature_scale(c, y)};
                 },
                 false, always});
  out.push_back({"ricci_symmetry_1",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{ricci_symmetry_residuals(c, y, s).crc1, curvature_scale(c, y)};
                 },
                 false, always});
  out.push_back({"ricci_symmetry_2",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{ricci_symmetry_residuals(c, y, s).crc2.value_or(0.0), curvature_scale(c, y)};
                 },
                 false, no_forms});
  out.push_back({"divergence",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{divergence_identity_residual(c, y, s), curvature_scale(c, y)};
                 },
                 false, no_forms, 1e-5});
  out.push_back({"divergence_trace",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{divergence_trace_residual(c, y, s), curvature_scale(c, y)};
                 },
                 false, no_forms, 1e-5});
  out.push_back({"degenerate_ricci_flow",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   return Residual{degenerate_ricci_flow_residual(c, y, s), curvature_scale(c, y)};
                 },
                 false, always});
  out.push_back({"evolution",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   EvolutionResidual e = curvature_evolution_residual(c, y, s, EvolutionForm::sharp);
                   return Residual{e.max_residual, e.scale};
                 },
                 false, always, 1e-5});
  out.push_back({"evolution_b_tensor",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   EvolutionResidual e = curvature_evolution_residual(c, y, s, EvolutionForm::b_tensor);
                   return Residual{e.max_residual, e.scale};
                 },
                 false, no_forms, 1e-5});
  out.push_back({"pair_symmetry_defect",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil&) {
                   SymmetryDefects d = symmetry_defects(c, y);
                   return Residual{std::max(d.first, d.second), curvature_scale(c, y)};
                 },
                 true, with_forms});
  out.push_back({"sharp_oracle",
                 [](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil&) {
                   SpacetimeCurvature e = curvature_closed_form(c, y);
                   Tensor gi = gtilde_inverse(c, y);
                   return Residual{max_abs_diff(sharp(e.low, e.low, gi), sharp_bruteforce(e.low, e.low, gi)),
                                   max_abs(e.low) * max_abs(e.low) * std::max(1.0, max_abs(gi) * max_abs(gi))};
                 },
                 true, always});
  auto point = [](const SpacetimeConnection& c, const Coord& y) { return chart_point(c, y); };
  out.push_back({"rpm_riemann",
                 [point](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   DictionaryReport d = rpm_dictionary(*c.base, point(c, y), &s);
                   return Residual{d.riemann, d.scale};
                 },
                 false, hamilton_case, 1e-5});
  out.push_back({"rpm_p",
                 [point](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   DictionaryReport d = rpm_dictionary(*c.base, point(c, y), &s);
                   return Residual{d.p, d.scale};
                 },
                 false, hamilton_case, 1e-5});
  out.push_back({"rpm_m",
                 [point](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   DictionaryReport d = rpm_dictionary(*c.base, point(c, y), &s);
                   return Residual{d.m, d.scale};
                 },
                 false, hamilton_case, 1e-5});
  out.push_back({"hamilton_evolution",
                 [point](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil&) {
                   HamiltonResiduals h = hamilton_evolution_residuals(*c.base, point(c, y));
                   return Residual{std::max({h.r_max, h.p_max, h.m_max}), h.scale};
                 },
                 true, hamilton_case, 1e-5});
  out.push_back({"hamilton_equivalence",
                 [point](const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s) {
                   EquivalenceReport e = evolution_equivalence(*c.base, point(c, y), s);
                   return Residual{e.mismatch, e.scale};
                 },
                 false, hamilton_case, 1e-5});
  return out;
}

std::vector<ConnSpec> connection_specs(const MetricFamily& fam) {
  std::vector<ConnSpec> out;
  for (double mu : {0.0, 0.5}) {
    out.push_back({mu, FormKind::none});
    if (fam.dimension == 2 && fam.phi && fam.f) out.push_back({mu, FormKind::surface_phi_f});
  }
  return out;
}

ChartPoint center(const MetricFamily& fam) { return fam.sample(0.5, std::vector<double>(fam.dimension, 0.5)); }

}  // namespace

void SuiteConfig::validate() const {
  stencil.validate();
  if (samples < 1) throw ConfigError("samples must be positive");
  if (tolerance && !(*tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(coarse_h > 0.0)) throw ConfigError("coarse step must be positive");
  if (w_samples < 1 || algebra_samples < 1) throw ConfigError("sample counts must be positive");
  catalog(solution);
}

bool SuiteResult::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const IdentityReport& r) { return r.pass; });
}

bool SweepResult::pass() const {
  return std::all_of(quadratics.begin(), quadratics.end(), [](const SweepEntry& e) { return e.pass; }) &&
         std::all_of(algebra.begin(), algebra.end(), [](const IdentityReport& r) { return r.pass; });
}

std::vector<ChartPoint> sample_points(const MetricFamily& fam, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ChartPoint> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    const double ut = u(rng);
    std::vector<double> ux(fam.dimension);
    for (auto& v : ux) v = u(rng);
    out.push_back(fam.sample(ut, ux));
  }
  return out;
}

SuiteResult run_identity_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const MetricFamily& fam = catalog(cfg.solution);
  // the space-time connection is built from dg/dt = -2 Rc
  if (!fam.solves_flow) throw ScopeError(fam.name + " is not a Ricci-flow solution");
  const std::vector<ChartPoint> pts = sample_points(fam, cfg.samples, cfg.seed);
  SuiteResult res;
  for (const ConnSpec& k : connection_specs(fam)) {
    const SpacetimeConnection c =
        build_connection(fam, k.mu, k.forms == FormKind::none ? 0.0 : k.mu, make_form_pair(fam, k.forms), k.mu == 0.5);
    std::vector<Coord> ys;
    for (const ChartPoint& p : pts) ys.push_back(picture_coord(c, p));
    const Coord yc = picture_coord(c, center(fam));
    for (const Check& chk : identity_checks()) {
      if (!chk.applies(fam, k)) continue;
      std::vector<Outcome> out = evaluate_all(ys.size(), [&](size_t i) { return chk.eval(c, ys[i], cfg.stencil); });
      IdentityReport rep = fold(chk.name, c.describe(), out, cfg, chk.tol_floor);
      if (chk.exact_path) {
        rep.exact = true;
      } else if (cfg.convergence) {
        measure_order(rep, [&](const DerivativeStencil& s) { return chk.eval(c, yc, s); }, cfg);
      }
      res.reports.push_back(std::move(rep));
    }
  }
  return res;
}

SuiteResult run_soliton_suite(const SuiteConfig& cfg) {
  cfg.validate();
  const MetricFamily& fam = catalog(cfg.solution);
  if (fam.soliton_kind == SolitonKind::none) throw ConfigError(fam.name + " is not a soliton");
  const std::vector<ChartPoint> pts = sample_points(fam, cfg.samples, cfg.seed);
  const ChartPoint pc = center(fam);
  const double mu = fam.soliton_kind == SolitonKind::steady ? 0.0 : 0.5;
  const double other = mu == 0.0 ? 0.5 : 0.0;
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  const std::vector<Tensor> ws = random_vectors(fam.dimension, cfg.w_samples, rng);
  // shrinkers have no mu in {0, 1/2} picture where they become steady
  const bool has_picture = fam.soliton_kind != SolitonKind::shrinking;
  const std::string conf = fam.name + " kind=" + to_string(fam.soliton_kind) +
                           (has_picture ? std::string(" mu=") + (mu == 0.0 ? "0" : "0.5") : " homothetic");

  using PointEval = std::function<Residual(const ChartPoint&, const DerivativeStencil&)>;
  struct SolCheck {
    std::string name;
    PointEval eval;
    bool exact_path;
    bool parallel_picture = false;  // needs a picture in which the soliton is steady
  };
  std::vector<SolCheck> checks{
      {"ricci_flow_gate",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         FlowGate g = ricci_flow_residual(fam, p, s);
         return Residual{g.max_residual, g.scale};
       },
       false},
      {"soliton_equation",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         SolitonEquationReport r = verify_soliton_equation(fam, p, s);
         return Residual{r.equation, r.scale};
       },
       false},
      {"soliton_closedness",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         SolitonEquationReport r = verify_soliton_equation(fam, p, s);
         return Residual{r.closedness, r.scale};
       },
       false},
      {"parallel_v",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         ParallelReport r = verify_parallel_v(fam, mu, p, s);
         return Residual{r.fd_max, max_abs(r.derivative)};
       },
       false, true},
      {"parallel_v_closed",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         return Residual{verify_parallel_v(fam, mu, p, s).closed_max, 1.0};
       },
       true, true},
      {"curvature_annihilation",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         AnnihilationReport r = verify_curvature_annihilates_v(fam, mu, p, s, {});
         return Residual{r.fd_max, r.scale};
       },
       false, true},
      {"curvature_annihilation_closed",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         AnnihilationReport r = verify_curvature_annihilates_v(fam, mu, p, s, {});
         return Residual{r.closed_max, r.scale};
       },
       true, true},
      {"z_sharpness",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         AnnihilationReport r = verify_curvature_annihilates_v(fam, mu, p, s, ws);
         return Residual{r.z_max, r.scale};
       },
       true, true},
      {"divergence_identities",
       [&](const ChartPoint& p, const DerivativeStencil& s) {
         DivIdentityReport r = verify_div_identities(fam, p, s);
         return Residual{r.max(), r.scale};
       },
       false},
  };

  SuiteResult res;
  for (const SolCheck& chk : checks) {
    if (chk.parallel_picture && !has_picture) continue;
    std::vector<Outcome> out = evaluate_all(pts.size(), [&](size_t i) { return chk.eval(pts[i], cfg.stencil); });
    IdentityReport rep = fold(chk.name, conf, out, cfg);
    if (chk.exact_path) {
      rep.exact = true;
    } else if (cfg.convergence) {
      measure_order(rep, [&](const DerivativeStencil& s) { return chk.eval(pc, s); }, cfg);
    }
    res.reports.push_back(std::move(rep));
    if (chk.name == "ricci_flow_gate" && !res.reports.back().pass) return res;  // not a flow: nothing else applies
  }

  if (!has_picture) return res;
  // negative control: the field is not parallel in the other picture
  std::vector<Outcome> out = evaluate_all(pts.size(), [&](size_t i) {
    ParallelReport r = verify_parallel_v(fam, other, pts[i], cfg.stencil);
    return Residual{r.fd_max, max_abs(r.derivative)};
  });
  IdentityReport ctl;
  ctl.identity_name = "wrong_picture_control";
  ctl.configuration = fam.name + " mu=" + (other == 0.0 ? "0" : "0.5");
  ctl.sample_count = static_cast<int>(out.size());
  ctl.tolerance = 1e-2;  // minimum residual must exceed this
  ctl.max_residual = std::numeric_limits<double>::infinity();
  for (const Outcome& o : out) {
    if (!o.error.empty()) {
      ctl.note = o.error;
      continue;
    }
    ctl.max_residual = std::min(ctl.max_residual, o.r.value);
    ctl.scale = std::max(ctl.scale, o.r.scale);
  }
  ctl.exact = true;
  ctl.pass = ctl.note.empty() && ctl.max_residual > ctl.tolerance;
  res.reports.push_back(ctl);
  return res;
}

SweepResult run_harnack_sweep(const SuiteConfig& cfg) {
  cfg.validate();
  const MetricFamily& fam = catalog(cfg.solution);
  const std::vector<ChartPoint> pts = sample_points(fam, cfg.samples, cfg.seed);
  const int n = fam.dimension;
  const bool surface_forms = n == 2 && fam.phi && fam.f;
  const bool kaehler = n == 2 && static_cast<bool>(fam.scalar_oracle);

  struct Quad {
    std::string id;
    std::function<HarnackQuadratic(const ChartPoint&)> build;
  };
  std::vector<Quad> quads{{"hamilton_Z", [&](const ChartPoint& p) { return z_quadratic(local_data(fam, p), true); }}};
  if (surface_forms) {
    FormPair fp = make_form_pair(fam, FormKind::surface_phi_f);
    quads.push_back({"psi_surface", [&fam, fp](const ChartPoint& p) { return psi_quadratic(local_data(fam, p, fp)); }});
  }
  if (kaehler) {
    FormPair fp = make_form_pair(fam, FormKind::kaehler_full);
    quads.push_back(
        {"kaehler_matrix", [&fam, fp](const ChartPoint& p) { return kaehler_matrix_quadratic(local_data(fam, p, fp)); }});
  }

  // Hamilton's inequality needs a solution with non-negative curvature operator
  std::vector<double> scal(pts.size());
  tbb::parallel_for(size_t(0), pts.size(), [&](size_t i) { scal[i] = local_data(fam, pts[i]).scalar; });
  const bool z_gated = fam.solves_flow && n == 2 && *std::min_element(scal.begin(), scal.end()) >= 0.0;

  SweepResult res;
  for (const Quad& q : quads) {
    std::vector<EigenSample> es(pts.size());
    std::vector<double> sc(pts.size(), 0.0);
    std::vector<std::string> err(pts.size());
    tbb::parallel_for(size_t(0), pts.size(), [&](size_t i) {
      try {
        HarnackQuadratic h = q.build(pts[i]);
        es[i] = min_eigenvalue(h);
        sc[i] = h.scale();
      } catch (const Error& e) {
        err[i] = e.what();
      }
    });
    SweepEntry e;
    e.quadratic_id = q.id;
    e.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i) {
      if (!err[i].empty()) continue;
      e.scale = std::max(e.scale, sc[i]);
      if (es[i].min_eigenvalue < e.min_eigenvalue) {
        e.min_eigenvalue = es[i].min_eigenvalue;
        e.argmin_sample = static_cast<int>(i);
        e.u_norm = es[i].u_norm;
        e.w_norm = es[i].w_norm;
      }
    }
    e.gated = q.id == "hamilton_Z" && z_gated;
    if (e.gated) {
      const double tol = cfg.tolerance ? *cfg.tolerance : 1e-9 * (1.0 + e.scale);
      e.pass = e.argmin_sample >= 0 && e.min_eigenvalue >= -tol;
    }
    res.quadratics.push_back(e);
  }

  // algebraic identities on random inputs
  const int m = cfg.algebra_samples;
  std::mt19937_64 rng(cfg.seed ^ 0xa16eb7aULL);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  struct Input {
    size_t point;
    Tensor u, w, v;
    double lambda;
  };
  std::vector<Input> inputs;
  for (int k = 0; k < m; ++k)
    inputs.push_back({static_cast<size_t>(k) % pts.size(), random_two_form(n, rng), random_vector(n, rng),
                      random_vector(n, rng), lam(rng)});

  auto relative_fold = [&](const std::string& name, const std::string& conf, const std::vector<Outcome>& out,
                           double tol) {
    IdentityReport rep = fold(name, conf, out, cfg);
    rep.tolerance = tol;
    rep.exact = true;
    rep.pass = rep.note.empty() && rep.max_residual <= tol;
    return rep;
  };

  if (surface_forms || kaehler) {
    const FormKind kind = surface_forms ? FormKind::surface_phi_f : FormKind::kaehler_full;
    const FormPair fp = make_form_pair(fam, kind);
    const std::string conf = fam.name + " forms=" + to_string(kind);
    std::vector<Outcome> sc = evaluate_all(inputs.size(), [&](size_t i) {
      const Input& in = inputs[i];
      const ChartPoint& p = pts[in.point];
      Tensor wl = in.w;
      for (auto& v : wl.a) v *= in.lambda;
      const double lhs = psi_matrix(fam, scaled_forms(fp, in.lambda), p, in.u, in.w);
      const double rhs = psi_matrix(fam, fp, p, in.u, wl);
      const double size = psi_quadratic(local_data(fam, p, fp)).scale() * std::pow(norm(in.u) + norm(wl), 2);
      return Residual{std::abs(lhs - rhs) / std::max(size, 1e-300), size};
    });
    res.algebra.push_back(relative_fold("psi_scaling", conf, sc, 1e-12));
    std::vector<Outcome> tr = evaluate_all(inputs.size(), [&](size_t i) {
      const Input& in = inputs[i];
      LocalData d = local_data(fam, pts[in.point], fp);
      const double a = psi_trace(d, in.v), b = psi_trace_by_frame(d, in.v);
      double v2 = 0.0;  // |v|_g^2
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v2 += d.ginv(i, j) * in.v(i) * in.v(j);
      const double size = psi_quadratic(d).scale() * max_abs(d.ginv) * std::pow(1.0 + std::sqrt(v2), 2);
      return Residual{std::abs(a - b) / size, size};
    });
    res.algebra.push_back(relative_fold("psi_trace_frame", conf, tr, 1e-12));
  }

  // sharp against the brute-force structure-constant sum on the flat chart
  // metric of the same dimension
  {
    Tensor gi(n + 1, 2);
    for (int i = 1; i <= n; ++i) gi(i, i) = 1.0;
    std::vector<Tensor> fs, gs;
    for (int k = 0; k < m; ++k) {
      fs.push_back(spatial_curvature_like(n + 1, rng));
      gs.push_back(spatial_curvature_like(n + 1, rng));
    }
    std::vector<Outcome> out = evaluate_all(fs.size(), [&](size_t i) {
      const double size = max_abs(fs[i]) * max_abs(gs[i]);
      return Residual{max_abs_diff(sharp(fs[i], gs[i], gi), sharp_bruteforce(fs[i], gs[i], gi)) / size, size};
    });
    res.algebra.push_back(relative_fold("sharp_oracle", "flat n=" + std::to_string(n), out, 1e-13));
  }
  return res;
}

}  // namespace lyh
