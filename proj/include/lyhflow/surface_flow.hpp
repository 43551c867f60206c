#pragma once
// 2-D Ricci flow in conformal gauge g = e^{2u} g0 on the flat torus and on the
// axisymmetric round sphere, co-evolving
//   du/dt = -R/2,  dphi/dt = Lap phi + R phi,  df/dt = Lap f + phi^2,
// with pointwise LYH monitors on the grid.
//
// Torus: N x N periodic nodes on [0, 2pi)^2, 5-point Laplacian.
// Sphere: N cells in colatitude with centres theta_i = (i + 1/2) pi / N and a
// conservative finite-volume Laplacian; the pole faces carry zero flux, which
// makes the discrete Gauss-Bonnet integral exact. Derivatives at the first and
// last cell use even reflection across the pole.

#include <optional>
#include <string>
#include <vector>

#include "lyhflow/harnack.hpp"

namespace lyh {

enum class Background { torus, sphere_axisym };
std::string to_string(Background b);
Background background_from_string(const std::string& s);

enum class PhiFMode { explicit_pde, closed_form_tR1 };
std::string to_string(PhiFMode m);
PhiFMode phi_f_mode_from_string(const std::string& s);

// c + a cos(mx x) cos(my y) on the torus, c + a cos(mx theta) on the sphere
struct Profile {
  double constant = 0.0;
  double amplitude = 0.0;
  int mode_x = 0;
  int mode_y = 0;
};

struct SurfaceState {
  Background background = Background::sphere_axisym;
  int resolution = 0;
  double time = 0.0;
  std::vector<double> u, phi, f;
  std::string bc_record;

  size_t size() const { return u.size(); }
  double spacing() const;
  void validate() const;  // finite values, matching sizes
};

SurfaceState make_state(Background bg, int n, double t0, const Profile& u, const Profile& phi, const Profile& f);
// uniform unit sphere at t, u = ln(1 - 2t)/2
SurfaceState exact_sphere_state(int n, double t);

// f solving Lap f = c - phi^2 with c the area mean of phi^2 (the only
// constant for which the equation is solvable on a closed surface). Returns
// the margin c - max |grad phi|^2 / R, which must be positive for the trace
// hypothesis to hold. Sphere only.
double init_f_elliptic(SurfaceState& s);

struct FlowConfig {
  double dt_safety = 0.5;
  double t_end = 0.3;
  int monitor_stride = 50;
  std::vector<std::string> quadratics{"surface_trace", "surface_matrix", "F_monitor"};
  PhiFMode phi_f_mode = PhiFMode::explicit_pde;
  double blowup_factor = 1e3;
  double dt_min = 1e-9;
  double eps_r = 1e-6;
  double f_residual_min_r = 1e-3;
  bool f_inequality = true;
  double persistence_eps = 1e-4;  // relative to the quadratic scale
};
std::vector<std::string> known_quadratics();

// stable explicit step c h^2 min e^{2u} / 4
double stable_dt(const SurfaceState& s, const FlowConfig& cfg);
// one classical RK4 step
SurfaceState step(const SurfaceState& s, double dt, PhiFMode mode);
// re-evaluate phi = tR + 1, f = t^2 R + t from u
void apply_closed_form(SurfaceState& s);

std::vector<double> scalar_curvature(const SurfaceState& s);
std::vector<double> laplacian(const SurfaceState& s, const std::vector<double>& v);  // Lap of g(t)
std::vector<double> area_weights(const SurfaceState& s);  // e^{2u} dA0 per node
double gauss_bonnet(const SurfaceState& s);              // integral of R dA

// A = phi dS and E = -2 df in coordinates (x, y) or (theta, varphi)
struct InducedForms {
  std::vector<double> a12;      // A_12 per node
  std::vector<double> e1, e2;   // E components per node
  double max_a_norm_defect = 0.0;  // max | |A|^2 - 2 phi^2 |
  double max_de = 0.0;             // max |dE| (discrete)
};
InducedForms induced_form_pair(const SurfaceState& s);

// pointwise data in the orthonormal frame e^{-u} (d_1, d_2 / sin theta)
struct GridPoint {
  SurfacePoint surface;
  FNPoint fn;
  double scalar = 0.0;
};
GridPoint grid_point(const SurfaceState& s, size_t i, const std::vector<double>& r);

struct QuadraticSample {
  std::string quadratic_id;
  double min_eigenvalue = 0.0;
  size_t argmin_index = 0;
  double u_norm = 0.0, w_norm = 0.0;
  double scale = 0.0;
};

struct MonitorRecord {
  double t = 0.0;
  std::vector<QuadraticSample> quadratics;
  double gauss_bonnet = 0.0;
  double min_f = 0.0;
  int undefined_f = 0;
  double min_n = 0.0;
  double n_scale = 0.0;
  std::optional<double> min_f_residual;  // dF/dt - Lap F - RF - (...)^2 / R where R > threshold
  double f_residual_scale = 0.0;
  std::optional<double> min_monotone_delta;  // min over grid of the change in t(tR + 1)
  double monotone_scale = 0.0;
  double max_r = 0.0, min_r = 0.0;
};

struct FlowResult {
  std::vector<MonitorRecord> series;
  SurfaceState final_state;
  int steps = 0;
  bool completed = false;
  std::string stop_reason;  // "t_end", "singularity", "non-finite"
  bool hypothesis_met = true;
  bool persisted = true;
  bool curvature_sign_change = false;
};

MonitorRecord monitor(const SurfaceState& s, const FlowConfig& cfg, const SurfaceState* previous = nullptr);
FlowResult run_with_monitors(const SurfaceState& init, const FlowConfig& cfg);

}  // namespace lyh
