// Acceptance run: one PASS/FAIL line per criterion, with wall time against
// the runtime budget. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lyhflow/errors.hpp"
#include "lyhflow/suite.hpp"
#include "lyhflow/surface_flow.hpp"

using namespace lyh;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail.str("");
    if (!pass) detail << "; ";
    pass = false;
    detail << why;
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// worst residual of the named identities among reports whose configuration
// contains every token in `must`
struct Worst {
  double residual = 0.0;
  double min_order = std::numeric_limits<double>::infinity();
  int count = 0;
  std::string where;
};
Worst worst_of(const std::vector<IdentityReport>& reps, const std::set<std::string>& names,
               const std::vector<std::string>& must = {}) {
  Worst w;
  for (const IdentityReport& r : reps) {
    if (!names.count(r.identity_name)) continue;
    bool ok = true;
    for (const std::string& m : must) ok = ok && r.configuration.find(m) != std::string::npos;
    if (!ok) continue;
    ++w.count;
    const double v = std::isfinite(r.max_residual) ? r.max_residual : std::numeric_limits<double>::infinity();
    if (v >= w.residual) {
      w.residual = v;
      w.where = r.identity_name + " [" + r.configuration + "]";
    }
    if (!r.note.empty()) w.residual = std::numeric_limits<double>::infinity();
    if (r.convergence_order) w.min_order = std::min(w.min_order, *r.convergence_order);
  }
  return w;
}

void report(int id, const Verdict& v, double secs, double budget) {
  std::printf("criterion %d: %s  %s  (%.1f s, budget %.0f s)\n", id, v.pass && secs <= budget ? "PASS" : "FAIL",
              v.detail.str().c_str(), secs, budget);
  std::fflush(stdout);
}

bool run_guarded(const std::function<void(Verdict&)>& body, Verdict& v) {
  try {
    body(v);
  } catch (const std::exception& e) {
    v.fail(std::string("error: ") + e.what());
  }
  return v.pass;
}

struct SphereRuns {
  FlowResult uniform, perturbed, closed_form;
  double uniform_secs = 0.0, perturbed_secs = 0.0;
  double margin = 0.0;
  double r_min_t0 = 0.0;
};

}  // namespace

int main() {
  bool all = true;
  auto finish = [&](int id, const Verdict& v, double secs, double budget) {
    report(id, v, secs, budget);
    all = all && v.pass && secs <= budget;
  };

  // --- 1-3: identity suite on the three flow families, 100 samples each
  std::map<std::string, SuiteResult> ids;
  double id_secs = 0.0;
  Verdict v1, v2, v3;
  run_guarded(
      [&](Verdict&) {
        const auto t = Clock::now();
        for (const std::string fam : {"flat_torus", "cigar", "round_sphere_2d"}) {
          SuiteConfig c;
          c.solution = fam;
          c.samples = 100;
          ids[fam] = run_identity_suite(c);
        }
        id_secs = seconds_since(t);
      },
      v1);
  if (v1.pass) {
    std::vector<IdentityReport> all_reps;
    for (auto& [name, r] : ids) all_reps.insert(all_reps.end(), r.reports.begin(), r.reports.end());

    const std::set<std::string> c1{"compatibility", "curvature_closed_form", "bianchi_first", "bianchi_second",
                                   "ricci_symmetry_1", "ricci_symmetry_2"};
    Worst w = worst_of(all_reps, c1);
    std::set<std::string> configs;
    for (const IdentityReport& r : all_reps)
      if (r.identity_name == "compatibility") configs.insert(r.configuration);
    if (w.residual > 1e-6) v1.fail("residual " + sci(w.residual) + " at " + w.where);
    if (w.min_order < 3.5) v1.fail("order " + sci(w.min_order));
    // torus and sphere carry the surface pair, the cigar too: 3 families x 2 mu x 2 form settings
    if (configs.size() != 12) v1.fail(std::to_string(configs.size()) + " configurations instead of 12");
    if (v1.pass)
      v1.detail << "max residual " << sci(w.residual) << ", min order "
                << (std::isfinite(w.min_order) ? sci(w.min_order) : std::string("exact")) << ", " << configs.size()
                << " configurations";

    const std::set<std::string> c2{"divergence", "divergence_trace", "evolution", "evolution_b_tensor"};
    Worst sph = worst_of(ids["round_sphere_2d"].reports, c2, {"forms=zero"});
    Worst cig = worst_of(ids["cigar"].reports, c2, {"mu=0 ", "forms=zero"});
    Worst gen = worst_of(all_reps, {"evolution"}, {"forms=surface_phi_f"});
    if (sph.count == 0 || cig.count == 0 || gen.count == 0) v2.fail("missing configurations");
    if (sph.residual > 1e-5) v2.fail("sphere " + sci(sph.residual) + " at " + sph.where);
    if (cig.residual > 1e-5) v2.fail("cigar " + sci(cig.residual) + " at " + cig.where);
    if (gen.residual > 1e-4) v2.fail("general evolution " + sci(gen.residual) + " at " + gen.where);
    if (v2.pass)
      v2.detail << "sphere " << sci(sph.residual) << ", cigar " << sci(cig.residual) << ", A = phi dS "
                << sci(gen.residual);

    const std::set<std::string> c3{"rpm_riemann", "rpm_p", "rpm_m", "hamilton_equivalence", "hamilton_evolution"};
    Worst rs = worst_of(ids["round_sphere_2d"].reports, c3);
    Worst rc = worst_of(ids["cigar"].reports, c3);
    if (rs.count < 5 || rc.count < 5) v3.fail("missing checks");
    if (rs.residual > 1e-5) v3.fail("sphere " + sci(rs.residual) + " at " + rs.where);
    if (rc.residual > 1e-5) v3.fail("cigar " + sci(rc.residual) + " at " + rc.where);
    if (v3.pass) v3.detail << "sphere " << sci(rs.residual) << ", cigar " << sci(rc.residual);
  } else {
    v2.fail("identity suite did not run");
    v3.fail("identity suite did not run");
  }
  // one shared run covers 1-3; the smallest budget applies to all three
  finish(1, v1, id_secs, 120);
  finish(2, v2, id_secs, 120);
  finish(3, v3, id_secs, 120);

  // --- 4: cigar soliton sharpness
  {
    Verdict v;
    const auto t = Clock::now();
    run_guarded(
        [&](Verdict& v) {
          SuiteConfig c;
          c.solution = "cigar";
          c.samples = 100;
          c.w_samples = 50;
          const SuiteResult r = run_soliton_suite(c);
          const Worst par = worst_of(r.reports, {"parallel_v", "parallel_v_closed"});
          const Worst ann = worst_of(r.reports, {"curvature_annihilation", "curvature_annihilation_closed"});
          const Worst z = worst_of(r.reports, {"z_sharpness"});
          const Worst ctl = worst_of(r.reports, {"wrong_picture_control"});
          if (par.count == 0 || ann.count == 0 || z.count == 0 || ctl.count == 0) v.fail("missing checks");
          if (par.residual > 1e-6) v.fail("parallel " + sci(par.residual));
          if (ann.residual > 1e-6) v.fail("annihilation " + sci(ann.residual));
          if (z.residual > 1e-5) v.fail("Z " + sci(z.residual));
          if (!(ctl.residual > 1e-2)) v.fail("control " + sci(ctl.residual));
          if (v.pass)
            v.detail << "parallel " << sci(par.residual) << ", annihilation " << sci(ann.residual) << ", Z "
                     << sci(z.residual) << ", control min " << sci(ctl.residual);
        },
        v);
    finish(4, v, seconds_since(t), 30);
  }

  // --- 5-7, 9: sphere flows
  SphereRuns runs;
  Verdict v5, v6, v7, v9;
  {
    const auto t = Clock::now();
    run_guarded(
        [&](Verdict&) {
          FlowConfig cfg;
          cfg.t_end = 0.4;  // 0.8 of the singular time 1/2
          cfg.monitor_stride = 100;
          runs.uniform = run_with_monitors(exact_sphere_state(64, 0.0), cfg);
        },
        v5);
    runs.uniform_secs = seconds_since(t);
  }
  {
    const auto t = Clock::now();
    run_guarded(
        [&](Verdict&) {
          SurfaceState s = make_state(Background::sphere_axisym, 256, 0.05, {0.0, 0.1, 2, 0}, {1.0, 0.05, 1, 0}, {});
          runs.margin = init_f_elliptic(s);
          const std::vector<double> r = scalar_curvature(s);
          runs.r_min_t0 = *std::min_element(r.begin(), r.end());
          FlowConfig cfg;
          cfg.t_end = 0.3;
          cfg.monitor_stride = 50;
          runs.perturbed = run_with_monitors(s, cfg);
          cfg.phi_f_mode = PhiFMode::closed_form_tR1;
          runs.closed_form = run_with_monitors(s, cfg);
        },
        v6);
    runs.perturbed_secs = seconds_since(t);
  }

  const std::vector<const FlowResult*> sphere_runs{&runs.uniform, &runs.perturbed, &runs.closed_form};
  if (v5.pass) {
    const double tf = runs.uniform.final_state.time;
    const double exact = 2.0 / (1.0 - 2.0 * tf);
    double err = 0.0;
    for (double x : scalar_curvature(runs.uniform.final_state)) err = std::max(err, std::abs(x - exact) / exact);
    double drift = 0.0;
    for (const FlowResult* r : sphere_runs) {
      if (r->series.empty()) continue;
      const double gb0 = r->series.front().gauss_bonnet;
      for (const MonitorRecord& m : r->series) drift = std::max(drift, std::abs(m.gauss_bonnet - gb0) / std::abs(gb0));
    }
    if (!runs.uniform.completed || std::abs(tf - 0.4) > 1e-12) v5.fail("run stopped at t = " + sci(tf));
    if (err > 1e-5) v5.fail("R relative error " + sci(err));
    if (drift > 1e-4) v5.fail("Gauss-Bonnet drift " + sci(drift));
    if (v5.pass) v5.detail << "R relative error " << sci(err) << " at t = 0.4, Gauss-Bonnet drift " << sci(drift);
  }
  finish(5, v5, runs.uniform_secs, 60);

  if (v6.pass) {
    auto minima = [](const FlowResult& r) {
      double worst = std::numeric_limits<double>::infinity();
      for (const MonitorRecord& m : r.series)
        for (const QuadraticSample& q : m.quadratics) {
          if (q.quadratic_id == "F_monitor" || std::isnan(q.min_eigenvalue)) continue;
          worst = std::min(worst, q.min_eigenvalue / std::max(q.scale, 1e-300));
        }
      return worst;
    };
    if (!(runs.r_min_t0 > 0.0)) v6.fail("R not positive at t0");
    if (!(runs.margin > 0.0)) v6.fail("elliptic margin " + sci(runs.margin));
    for (const FlowResult* r : {&runs.perturbed, &runs.closed_form}) {
      if (!r->completed) v6.fail("run stopped: " + r->stop_reason);
      if (!r->hypothesis_met) v6.fail("minima negative at t0");
      if (minima(*r) < -1e-4) v6.fail("minimum " + sci(minima(*r)) + " of scale");
    }
    if (v6.pass)
      v6.detail << "R_min(t0) " << sci(runs.r_min_t0) << ", relative minima: PDE " << sci(minima(runs.perturbed))
                << ", closed form " << sci(minima(runs.closed_form));
  }
  finish(6, v6, runs.perturbed_secs, 180);

  // --- 7: F and N monitors on every sphere snapshot
  {
    const auto t = Clock::now();
    double n_min = std::numeric_limits<double>::infinity(), f_rel = n_min;
    int snapshots = 0, f_snapshots = 0;
    for (const FlowResult* r : sphere_runs)
      for (const MonitorRecord& m : r->series) {
        ++snapshots;
        n_min = std::min(n_min, m.min_n);
        if (m.min_f_residual) {
          ++f_snapshots;
          f_rel = std::min(f_rel, *m.min_f_residual / std::max(m.f_residual_scale, 1e-300));
        }
      }
    if (snapshots == 0) v7.fail("no snapshots");
    if (!(n_min >= -1e-8)) v7.fail("N minimum " + sci(n_min));
    if (f_snapshots == 0) v7.fail("no F residual evaluated");
    if (!(f_rel >= -1e-3)) v7.fail("F residual " + sci(f_rel) + " of scale");
    if (v7.pass)
      v7.detail << "N min " << sci(n_min) << " over " << snapshots << " snapshots, F residual min " << sci(f_rel)
                << " of scale over " << f_snapshots;
    finish(7, v7, seconds_since(t) + runs.uniform_secs + runs.perturbed_secs, 240);
  }

  // --- 8: algebraic identities
  {
    Verdict v;
    const auto t = Clock::now();
    run_guarded(
        [&](Verdict& v) {
          double worst = 0.0;
          int checks = 0;
          std::set<std::string> dims;
          for (const std::string fam : {"round_sphere_2d", "round_sphere_polar", "flat_chart_3d"}) {
            SuiteConfig c;
            c.solution = fam;
            c.samples = 20;
            c.algebra_samples = 1000;
            const SweepResult r = run_harnack_sweep(c);
            for (const IdentityReport& a : r.algebra) {
              ++checks;
              if (a.identity_name == "sharp_oracle") dims.insert(a.configuration);
              if (!a.pass || !a.note.empty()) v.fail(a.identity_name + " " + sci(a.max_residual) + " [" + a.configuration + "]");
              const double tol = a.identity_name == "sharp_oracle" ? 1e-13 : 1e-12;
              if (!(a.max_residual <= tol)) v.fail(a.identity_name + " above " + sci(tol));
              worst = std::max(worst, a.max_residual);
            }
          }
          if (dims.size() != 2) v.fail("sharp oracle did not cover n = 2 and 3");
          if (v.pass) v.detail << checks << " identities, worst relative residual " << sci(worst);
        },
        v);
    finish(8, v, seconds_since(t), 120);
  }

  // --- 9: t(tR + 1) is non-decreasing on the positively curved run
  {
    const auto t = Clock::now();
    double worst = std::numeric_limits<double>::infinity();
    int deltas = 0;
    for (const MonitorRecord& m : runs.perturbed.series)
      if (m.min_monotone_delta) {
        ++deltas;
        worst = std::min(worst, *m.min_monotone_delta / std::max(m.monotone_scale, 1e-300));
      }
    bool positive = !runs.perturbed.series.empty() && !runs.perturbed.curvature_sign_change &&
                    runs.perturbed.series.front().min_r > 0.0;
    if (!positive) v9.fail("run is not positively curved throughout");
    if (deltas == 0) v9.fail("no consecutive monitor pairs");
    if (!(worst >= -1e-5)) v9.fail("delta " + sci(worst) + " of scale");
    if (v9.pass) v9.detail << "min relative delta " << sci(worst) << " over " << deltas << " steps";
    finish(9, v9, seconds_since(t) + runs.perturbed_secs, 180);
  }

  std::printf("acceptance: %s\n", all ? "all criteria pass" : "some criteria FAIL");
  return all ? 0 : 1;
}
