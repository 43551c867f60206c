#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "lyhflow/catalog.hpp"
#include "lyhflow/errors.hpp"
#include "lyhflow/harness.hpp"
#include "lyhflow/suite.hpp"
#include "lyhflow/surface_flow.hpp"

namespace py = pybind11;
using namespace lyh;

namespace {

py::object num(double v) { return std::isfinite(v) ? py::object(py::float_(v)) : py::object(py::none()); }
py::object num(const std::optional<double>& v) { return v ? num(*v) : py::object(py::none()); }

py::dict to_dict(const IdentityReport& r) {
  py::dict d;
  d["identity"] = r.identity_name;
  d["configuration"] = r.configuration;
  d["max_residual"] = num(r.max_residual);
  d["tolerance"] = r.tolerance;
  d["scale"] = num(r.scale);
  d["sample_count"] = r.sample_count;
  d["convergence_order"] = num(r.convergence_order);
  d["exact"] = r.exact;
  d["pass"] = r.pass;
  d["note"] = r.note;
  return d;
}

SuiteConfig suite_config(const std::string& solution, int samples, uint64_t seed, std::optional<double> tolerance,
                         bool convergence, double stencil_h, int order) {
  SuiteConfig c;
  c.solution = solution;
  c.samples = samples;
  c.seed = seed;
  c.tolerance = tolerance;
  c.convergence = convergence;
  c.stencil.spatial_step = stencil_h;
  c.stencil.time_step = stencil_h;
  c.stencil.order = order;
  return c;
}

py::list reports(const std::vector<IdentityReport>& reps) {
  py::list out;
  for (const IdentityReport& r : reps) out.append(to_dict(r));
  return out;
}

Profile profile(const std::vector<double>& p) {
  if (p.size() > 4) throw ConfigError("a profile has at most 4 entries (constant, amplitude, mode_x, mode_y)");
  Profile out;
  if (p.size() > 0) out.constant = p[0];
  if (p.size() > 1) out.amplitude = p[1];
  if (p.size() > 2) out.mode_x = static_cast<int>(p[2]);
  if (p.size() > 3) out.mode_y = static_cast<int>(p[3]);
  return out;
}

py::dict monitor_dict(const MonitorRecord& m) {
  py::dict d;
  d["t"] = m.t;
  d["gauss_bonnet"] = m.gauss_bonnet;
  d["min_R"] = m.min_r;
  d["max_R"] = m.max_r;
  d["min_F"] = num(m.min_f);
  d["undefined_F_count"] = m.undefined_f;
  d["min_N"] = num(m.min_n);
  d["min_F_residual"] = num(m.min_f_residual);
  d["F_residual_scale"] = m.f_residual_scale;
  d["min_monotone_delta"] = num(m.min_monotone_delta);
  d["monotone_scale"] = m.monotone_scale;
  py::dict q;
  for (const QuadraticSample& s : m.quadratics) q[py::str(s.quadratic_id)] = num(s.min_eigenvalue);
  d["min_eigenvalues"] = q;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lyhflow, m) {
  m.doc() = "Space-time connection identities, Harnack quadratics and surface Ricci flow";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base(m, "LyhflowError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("catalog_names", &catalog_names, "Names of the catalog solutions");
  m.def("convention_hash", &convention_hash, "SHA-256 of the sign and basis conventions");

  m.def(
      "identity_suite",
      [](const std::string& solution, int samples, uint64_t seed, std::optional<double> tolerance, bool convergence,
         double stencil_h, int order) {
        SuiteConfig c = suite_config(solution, samples, seed, tolerance, convergence, stencil_h, order);
        py::gil_scoped_release release;
        SuiteResult r = run_identity_suite(c);
        py::gil_scoped_acquire acquire;
        return reports(r.reports);
      },
      py::arg("solution"), py::arg("samples") = 100, py::arg("seed") = 1, py::arg("tolerance") = py::none(),
      py::arg("convergence") = true, py::arg("stencil_h") = 1e-3, py::arg("order") = 4,
      "Space-time identity residuals on a catalog solution");

  m.def(
      "soliton_suite",
      [](const std::string& solution, int samples, uint64_t seed, std::optional<double> tolerance, bool convergence,
         double stencil_h, int order) {
        SuiteConfig c = suite_config(solution, samples, seed, tolerance, convergence, stencil_h, order);
        py::gil_scoped_release release;
        SuiteResult r = run_soliton_suite(c);
        py::gil_scoped_acquire acquire;
        return reports(r.reports);
      },
      py::arg("solution") = "cigar", py::arg("samples") = 100, py::arg("seed") = 1, py::arg("tolerance") = py::none(),
      py::arg("convergence") = true, py::arg("stencil_h") = 1e-3, py::arg("order") = 4);

  m.def(
      "harnack_sweep",
      [](const std::string& solution, int samples, uint64_t seed, int algebra_samples) {
        SuiteConfig c = suite_config(solution, samples, seed, std::nullopt, true, 1e-3, 4);
        c.algebra_samples = algebra_samples;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_harnack_sweep(c);
        }
        py::list qs;
        for (const SweepEntry& q : r.quadratics) {
          py::dict d;
          d["quadratic_id"] = q.quadratic_id;
          d["min_eigenvalue"] = num(q.min_eigenvalue);
          d["argmin_sample"] = q.argmin_sample;
          d["scale"] = num(q.scale);
          d["gated"] = q.gated;
          d["pass"] = q.pass;
          qs.append(d);
        }
        py::dict out;
        out["quadratics"] = qs;
        out["algebra"] = reports(r.algebra);
        out["pass"] = r.pass();
        return out;
      },
      py::arg("solution"), py::arg("samples") = 100, py::arg("seed") = 1, py::arg("algebra_samples") = 1000);

  m.def(
      "run_flow",
      [](const std::string& background, int resolution, double t0, double t_end, const std::vector<double>& u,
         const std::vector<double>& phi, const std::vector<double>& f, bool elliptic_f, const std::string& phi_f_mode,
         int monitor_stride) {
        SurfaceState s = make_state(background_from_string(background), resolution, t0, profile(u), profile(phi),
                                    profile(f));
        std::optional<double> margin;
        if (elliptic_f) margin = init_f_elliptic(s);
        FlowConfig cfg;
        cfg.t_end = t_end;
        cfg.phi_f_mode = phi_f_mode_from_string(phi_f_mode);
        cfg.monitor_stride = monitor_stride;
        FlowResult r;
        {
          py::gil_scoped_release release;
          r = run_with_monitors(s, cfg);
        }
        py::list series;
        for (const MonitorRecord& rec : r.series) series.append(monitor_dict(rec));
        py::dict out;
        out["completed"] = r.completed;
        out["stop_reason"] = r.stop_reason;
        out["steps"] = r.steps;
        out["t_final"] = r.final_state.time;
        out["hypothesis_met"] = r.hypothesis_met;
        out["persisted"] = r.persisted;
        out["elliptic_margin"] = num(margin);
        out["series"] = series;
        out["u"] = r.final_state.u;
        out["phi"] = r.final_state.phi;
        out["f"] = r.final_state.f;
        out["scalar_curvature"] = scalar_curvature(r.final_state);
        return out;
      },
      py::arg("background") = "sphere_axisym", py::arg("resolution") = 64, py::arg("t0") = 0.05,
      py::arg("t_end") = 0.3, py::arg("u") = std::vector<double>{0.0, 0.1, 2, 0},
      py::arg("phi") = std::vector<double>{1.0, 0.05, 1, 0}, py::arg("f") = std::vector<double>{},
      py::arg("elliptic_f") = true, py::arg("phi_f_mode") = "explicit_pde", py::arg("monitor_stride") = 50,
      "Surface Ricci flow with LYH monitors; profiles are (constant, amplitude, mode_x, mode_y)");

  m.def(
      "execute",
      [](const std::string& command, const std::string& yaml) {
        RunConfig c;
        c.command = command_from_string(command);
        apply_yaml_text(c, yaml);
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = execute(c);
        }
        return py::make_tuple(out.exit_code, out.body);
      },
      py::arg("command"), py::arg("config") = "",
      "Run a command-line subcommand from YAML text; returns (exit_code, report)");
}
