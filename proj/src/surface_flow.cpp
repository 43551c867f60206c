#include "lyhflow/surface_flow.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyhflow/errors.hpp"

namespace lyh {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class Fn>
void for_cells(size_t n, Fn&& fn) {
  tbb::parallel_for(tbb::blocked_range<size_t>(0, n, 512), [&](const tbb::blocked_range<size_t>& r) {
    for (size_t i = r.begin(); i != r.end(); ++i) fn(i);
  });
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// neighbour access with periodic wrap (torus) or even reflection (sphere)
struct Grid {
  Background bg;
  int n;
  double h;
  std::vector<double> face_sin;  // sphere: sin(k h), k = 0..n
  std::vector<double> weight;    // sphere: cos(i h) - cos((i+1) h)
  std::vector<double> cot;       // sphere: cot(theta_i)

  explicit Grid(const SurfaceState& s) : bg(s.background), n(s.resolution), h(s.spacing()) {
    if (bg == Background::sphere_axisym) {
      face_sin.resize(n + 1);
      for (int k = 0; k <= n; ++k) face_sin[k] = std::sin(k * h);
      face_sin[0] = face_sin[n] = 0.0;
      weight.resize(n);
      cot.resize(n);
      for (int i = 0; i < n; ++i) {
        const double th = (i + 0.5) * h;
        weight[i] = 2.0 * std::sin(th) * std::sin(0.5 * h);
        cot[i] = std::cos(th) / std::sin(th);
      }
    }
  }
  size_t cells() const { return bg == Background::torus ? static_cast<size_t>(n) * n : n; }
  int wrap(int i) const { return ((i % n) + n) % n; }
  int reflect(int i) const { return i < 0 ? -1 - i : (i >= n ? 2 * n - 1 - i : i); }
  double at(const std::vector<double>& v, int i, int j = 0) const {
    if (bg == Background::torus) return v[static_cast<size_t>(wrap(i)) * n + wrap(j)];
    return v[reflect(i)];
  }

  // flat-background Laplacian
  double lap0(const std::vector<double>& v, size_t c) const {
    if (bg == Background::torus) {
      const int i = static_cast<int>(c / n), j = static_cast<int>(c % n);
      return (at(v, i + 1, j) + at(v, i - 1, j) + at(v, i, j + 1) + at(v, i, j - 1) - 4.0 * v[c]) / (h * h);
    }
    const int i = static_cast<int>(c);
    const double up = face_sin[i + 1] * (at(v, i + 1) - v[i]);
    const double dn = face_sin[i] * (v[i] - at(v, i - 1));
    return (up - dn) / (h * weight[i]);
  }

  double background_scalar() const { return bg == Background::torus ? 0.0 : 2.0; }
};

struct Rhs {
  std::vector<double> u, phi, f;
};

Rhs rhs(const Grid& G, const SurfaceState& s, bool evolve_forms) {
  const size_t n = s.size();
  Rhs out;
  out.u.assign(n, 0.0);
  if (evolve_forms) {
    out.phi.assign(n, 0.0);
    out.f.assign(n, 0.0);
  }
  const double r0 = G.background_scalar();
  for_cells(n, [&](size_t c) {
    const double e = std::exp(-2.0 * s.u[c]);
    const double lu = G.lap0(s.u, c);
    const double R = e * (r0 - 2.0 * lu);
    out.u[c] = -0.5 * R;
    if (evolve_forms) {
      out.phi[c] = e * G.lap0(s.phi, c) + R * s.phi[c];
      out.f[c] = e * G.lap0(s.f, c) + s.phi[c] * s.phi[c];
    }
  });
  return out;
}

SurfaceState axpy(const SurfaceState& s, double a, const Rhs& k, bool forms) {
  SurfaceState out = s;
  for (size_t c = 0; c < s.size(); ++c) {
    out.u[c] += a * k.u[c];
    if (forms) {
      out.phi[c] += a * k.phi[c];
      out.f[c] += a * k.f[c];
    }
  }
  return out;
}

double cfl_limit(const SurfaceState& s) {
  const double h = s.spacing();
  const double umin = *std::min_element(s.u.begin(), s.u.end());
  return h * h * std::exp(2.0 * umin) / 4.0;
}

double eval_profile(const Profile& p, Background bg, double x, double y) {
  if (bg == Background::torus) return p.constant + p.amplitude * std::cos(p.mode_x * x) * std::cos(p.mode_y * y);
  return p.constant + p.amplitude * std::cos(p.mode_x * x);
}

struct CellValues {
  double f_value = 0.0;
  bool f_defined = false;
  double f_scale = 0.0;
  double n = 0.0, n_scale = 0.0;
  double sq_term = 0.0;  // (Lap phi - <grad phi, grad ln R> + phi R)^2 / R
};

double sq(double x) { return x * x; }

}  // namespace

std::string to_string(Background b) { return b == Background::torus ? "torus" : "sphere_axisym"; }

Background background_from_string(const std::string& s) {
  if (s == "torus") return Background::torus;
  if (s == "sphere_axisym" || s == "sphere") return Background::sphere_axisym;
  throw ConfigError("unknown background '" + s + "' (torus | sphere_axisym)");
}

std::string to_string(PhiFMode m) { return m == PhiFMode::explicit_pde ? "explicit_pde" : "closed_form_tR1"; }

PhiFMode phi_f_mode_from_string(const std::string& s) {
  if (s == "explicit_pde") return PhiFMode::explicit_pde;
  if (s == "closed_form_tR1") return PhiFMode::closed_form_tR1;
  throw ConfigError("unknown phi_f_mode '" + s + "' (explicit_pde | closed_form_tR1)");
}

std::vector<std::string> known_quadratics() { return {"surface_trace", "surface_matrix", "F_monitor"}; }

double SurfaceState::spacing() const {
  return background == Background::torus ? 2.0 * kPi / resolution : kPi / resolution;
}

void SurfaceState::validate() const {
  const size_t want = background == Background::torus ? static_cast<size_t>(resolution) * resolution : resolution;
  if (resolution < 4) throw ConfigError("resolution must be at least 4");
  if (u.size() != want || phi.size() != want || f.size() != want) throw ShapeError("state arrays do not match the grid");
  if (!all_finite(u) || !all_finite(phi) || !all_finite(f)) throw BlowUpError("non-finite state values");
}

SurfaceState make_state(Background bg, int n, double t0, const Profile& u, const Profile& phi, const Profile& f) {
  if (n < 4) throw ConfigError("resolution must be at least 4");
  SurfaceState s;
  s.background = bg;
  s.resolution = n;
  s.time = t0;
  s.bc_record = bg == Background::torus ? "periodic" : "cell_centred_pole_reflection";
  const double h = s.spacing();
  const size_t cells = bg == Background::torus ? static_cast<size_t>(n) * n : n;
  s.u.resize(cells);
  s.phi.resize(cells);
  s.f.resize(cells);
  for (size_t c = 0; c < cells; ++c) {
    double x, y = 0.0;
    if (bg == Background::torus) {
      x = static_cast<double>(c / n) * h;
      y = static_cast<double>(c % n) * h;
    } else {
      x = (static_cast<double>(c) + 0.5) * h;
    }
    s.u[c] = eval_profile(u, bg, x, y);
    s.phi[c] = eval_profile(phi, bg, x, y);
    s.f[c] = eval_profile(f, bg, x, y);
  }
  return s;
}

SurfaceState exact_sphere_state(int n, double t) {
  if (!(t < 0.5)) throw DomainError("the unit sphere is singular at t = 1/2");
  SurfaceState s = make_state(Background::sphere_axisym, n, t, {0.5 * std::log(1.0 - 2.0 * t)}, {}, {});
  apply_closed_form(s);
  return s;
}

double init_f_elliptic(SurfaceState& s) {
  if (s.background != Background::sphere_axisym) throw UnsupportedError("the elliptic recipe is implemented on the sphere");
  s.validate();
  Grid G(s);
  const int n = s.resolution;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = G.weight[i] * std::exp(2.0 * s.u[i]);
    num += a * sq(s.phi[i]);
    den += a;
  }
  const double c = num / den;
  // Lap0 f = e^{2u}(c - phi^2): integrate the flux from the north pole
  std::vector<double> flux(n + 1, 0.0);
  for (int i = 0; i < n; ++i) flux[i + 1] = flux[i] + G.weight[i] * std::exp(2.0 * s.u[i]) * (c - sq(s.phi[i]));
  s.f.assign(n, 0.0);
  for (int k = 1; k < n; ++k) s.f[k] = s.f[k - 1] + G.h * flux[k] / G.face_sin[k];
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += G.weight[i] * std::exp(2.0 * s.u[i]) * s.f[i];
  mean /= den;
  for (double& v : s.f) v -= mean;

  std::vector<double> r = scalar_curvature(s);
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.size(); ++i) {
    if (!(r[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    GridPoint p = grid_point(s, i, r);
    const double g2 = sq(p.surface.grad_phi(0)) + sq(p.surface.grad_phi(1));
    worst = std::max(worst, g2 / r[i]);
  }
  return c - worst;
}

double stable_dt(const SurfaceState& s, const FlowConfig& cfg) {
  if (!(cfg.dt_safety > 0.0 && cfg.dt_safety <= 1.0)) throw ConfigError("dt_safety must lie in (0, 1]");
  return cfg.dt_safety * cfl_limit(s);
}

void apply_closed_form(SurfaceState& s) {
  std::vector<double> r = scalar_curvature(s);
  const double t = s.time;
  for (size_t c = 0; c < s.size(); ++c) {
    s.phi[c] = t * r[c] + 1.0;
    s.f[c] = t * t * r[c] + t;
  }
}

SurfaceState step(const SurfaceState& s, double dt, PhiFMode mode) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw StepSizeError("time step must be positive and finite");
  if (dt > cfl_limit(s) * (1.0 + 1e-12)) throw StepSizeError("time step exceeds the explicit stability limit");
  Grid G(s);
  const bool forms = mode == PhiFMode::explicit_pde;
  Rhs k1 = rhs(G, s, forms);
  Rhs k2 = rhs(G, axpy(s, 0.5 * dt, k1, forms), forms);
  Rhs k3 = rhs(G, axpy(s, 0.5 * dt, k2, forms), forms);
  Rhs k4 = rhs(G, axpy(s, dt, k3, forms), forms);
  SurfaceState out = s;
  for (size_t c = 0; c < s.size(); ++c) {
    out.u[c] += dt / 6.0 * (k1.u[c] + 2.0 * k2.u[c] + 2.0 * k3.u[c] + k4.u[c]);
    if (forms) {
      out.phi[c] += dt / 6.0 * (k1.phi[c] + 2.0 * k2.phi[c] + 2.0 * k3.phi[c] + k4.phi[c]);
      out.f[c] += dt / 6.0 * (k1.f[c] + 2.0 * k2.f[c] + 2.0 * k3.f[c] + k4.f[c]);
    }
  }
  out.time = s.time + dt;
  if (!forms) apply_closed_form(out);
  return out;
}

std::vector<double> scalar_curvature(const SurfaceState& s) {
  Grid G(s);
  std::vector<double> r(s.size());
  const double r0 = G.background_scalar();
  for_cells(s.size(), [&](size_t c) { r[c] = std::exp(-2.0 * s.u[c]) * (r0 - 2.0 * G.lap0(s.u, c)); });
  return r;
}

std::vector<double> laplacian(const SurfaceState& s, const std::vector<double>& v) {
  Grid G(s);
  if (v.size() != s.size()) throw ShapeError("field does not match the grid");
  std::vector<double> out(s.size());
  for_cells(s.size(), [&](size_t c) { out[c] = std::exp(-2.0 * s.u[c]) * G.lap0(v, c); });
  return out;
}

std::vector<double> area_weights(const SurfaceState& s) {
  Grid G(s);
  std::vector<double> w(s.size());
  for (size_t c = 0; c < s.size(); ++c) {
    const double a0 = s.background == Background::torus ? G.h * G.h : 2.0 * kPi * G.weight[c];
    w[c] = a0 * std::exp(2.0 * s.u[c]);
  }
  return w;
}

double gauss_bonnet(const SurfaceState& s) {
  std::vector<double> r = scalar_curvature(s), w = area_weights(s);
  double total = 0.0;
  for (size_t c = 0; c < s.size(); ++c) total += r[c] * w[c];
  return total;
}

InducedForms induced_form_pair(const SurfaceState& s) {
  s.validate();
  Grid G(s);
  const size_t m = s.size();
  InducedForms out;
  out.a12.resize(m);
  out.e1.resize(m);
  out.e2.resize(m);
  const int n = s.resolution;
  for (size_t c = 0; c < m; ++c) {
    const double e2u = std::exp(2.0 * s.u[c]);
    double gi11, gi22;
    if (s.background == Background::torus) {
      const int i = static_cast<int>(c / n), j = static_cast<int>(c % n);
      out.a12[c] = s.phi[c] * e2u;
      out.e1[c] = -2.0 * (G.at(s.f, i + 1, j) - G.at(s.f, i - 1, j)) / (2.0 * G.h);
      out.e2[c] = -2.0 * (G.at(s.f, i, j + 1) - G.at(s.f, i, j - 1)) / (2.0 * G.h);
      gi11 = gi22 = 1.0 / e2u;
    } else {
      const int i = static_cast<int>(c);
      const double st = std::sin((i + 0.5) * G.h);
      out.a12[c] = s.phi[c] * e2u * st;
      out.e1[c] = -2.0 * (G.at(s.f, i + 1) - G.at(s.f, i - 1)) / (2.0 * G.h);
      out.e2[c] = 0.0;
      gi11 = 1.0 / e2u;
      gi22 = 1.0 / (e2u * st * st);
    }
    // full double sum: A_12 and A_21 both contribute
    const double norm2 = 2.0 * gi11 * gi22 * sq(out.a12[c]);
    out.max_a_norm_defect = std::max(out.max_a_norm_defect, std::abs(norm2 - 2.0 * sq(s.phi[c])));
  }
  if (s.background == Background::torus) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d1e2 = (G.at(out.e2, i + 1, j) - G.at(out.e2, i - 1, j)) / (2.0 * G.h);
        const double d2e1 = (G.at(out.e1, i, j + 1) - G.at(out.e1, i, j - 1)) / (2.0 * G.h);
        out.max_de = std::max(out.max_de, std::abs(d1e2 - d2e1));
      }
  }
  return out;
}

GridPoint grid_point(const SurfaceState& s, size_t c, const std::vector<double>& r) {
  Grid G(s);
  const double h = G.h;
  const double e = std::exp(-s.u[c]);
  const double e2 = e * e;
  GridPoint p;
  Tensor id(2, 2);
  id(0, 0) = id(1, 1) = 1.0;
  Tensor grad_phi(2, 1), grad_f(2, 1), grad_r(2, 1), hess_phi(2, 2), hess_f(2, 2);

  if (s.background == Background::torus) {
    const int n = s.resolution;
    const int i = static_cast<int>(c / n), j = static_cast<int>(c % n);
    auto d1 = [&](const std::vector<double>& v, int dir) {
      return dir == 0 ? (G.at(v, i + 1, j) - G.at(v, i - 1, j)) / (2.0 * h)
                      : (G.at(v, i, j + 1) - G.at(v, i, j - 1)) / (2.0 * h);
    };
    auto d2 = [&](const std::vector<double>& v, int a, int b) {
      if (a != b)
        return (G.at(v, i + 1, j + 1) - G.at(v, i + 1, j - 1) - G.at(v, i - 1, j + 1) + G.at(v, i - 1, j - 1)) /
               (4.0 * h * h);
      return a == 0 ? (G.at(v, i + 1, j) - 2.0 * v[c] + G.at(v, i - 1, j)) / (h * h)
                    : (G.at(v, i, j + 1) - 2.0 * v[c] + G.at(v, i, j - 1)) / (h * h);
    };
    const double du[2] = {d1(s.u, 0), d1(s.u, 1)};
    auto frame = [&](const std::vector<double>& v, Tensor& grad, Tensor* hess) {
      const double dv[2] = {d1(v, 0), d1(v, 1)};
      for (int a = 0; a < 2; ++a) grad(a) = e * dv[a];
      if (!hess) return;
      const double dudv = du[0] * dv[0] + du[1] * dv[1];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          (*hess)(a, b) = e2 * (d2(v, a, b) - (du[b] * dv[a] + du[a] * dv[b] - (a == b ? dudv : 0.0)));
    };
    frame(s.phi, grad_phi, &hess_phi);
    frame(s.f, grad_f, &hess_f);
    frame(r, grad_r, nullptr);
  } else {
    const int i = static_cast<int>(c);
    auto d1 = [&](const std::vector<double>& v) { return (G.at(v, i + 1) - G.at(v, i - 1)) / (2.0 * h); };
    auto d2 = [&](const std::vector<double>& v) { return (G.at(v, i + 1) - 2.0 * v[i] + G.at(v, i - 1)) / (h * h); };
    const double du = d1(s.u);
    auto frame = [&](const std::vector<double>& v, Tensor& grad, Tensor* hess) {
      const double dv = d1(v);
      grad(0) = e * dv;
      grad(1) = 0.0;
      if (!hess) return;
      (*hess)(0, 0) = e2 * (d2(v) - du * dv);
      (*hess)(1, 1) = e2 * (G.cot[i] + du) * dv;
      (*hess)(0, 1) = (*hess)(1, 0) = 0.0;
    };
    frame(s.phi, grad_phi, &hess_phi);
    frame(s.f, grad_f, &hess_f);
    frame(r, grad_r, nullptr);
  }

  const double lap_f = e2 * G.lap0(s.f, c);
  p.scalar = r[c];
  p.surface.g = id;
  p.surface.scalar = r[c];
  p.surface.phi = s.phi[c];
  p.surface.grad_phi = grad_phi;
  p.surface.hess_f = hess_f;
  p.surface.dt_f = lap_f + sq(s.phi[c]);
  p.surface.orientation = 1;
  p.fn.g = id;
  p.fn.scalar = r[c];
  p.fn.grad_r = grad_r;
  p.fn.phi = s.phi[c];
  p.fn.grad_phi = grad_phi;
  p.fn.hess_phi = hess_phi;
  // N is the algebraic Cauchy-Schwarz form of the discrete Hessian
  p.fn.lap_phi = hess_phi(0, 0) + hess_phi(1, 1);
  p.fn.lap_f = lap_f;
  return p;
}

namespace {

// F and the pieces of its differential inequality on a whole state
struct FField {
  std::vector<double> f;
  std::vector<char> defined;
  std::vector<double> rhs_no_lap;  // RF + (Lap phi - <grad phi, grad ln R> + phi R)^2 / R
  std::vector<double> scale;
};

FField f_field(const SurfaceState& s, const std::vector<double>& r, double eps_r) {
  const size_t m = s.size();
  FField out;
  out.f.assign(m, 0.0);
  out.defined.assign(m, 0);
  out.rhs_no_lap.assign(m, 0.0);
  out.scale.assign(m, 0.0);
  std::vector<double> lap_phi = laplacian(s, s.phi);
  for_cells(m, [&](size_t c) {
    if (!(r[c] > eps_r)) return;
    GridPoint p = grid_point(s, c, r);
    const double R = r[c];
    const double g2 = sq(p.fn.grad_phi(0)) + sq(p.fn.grad_phi(1));
    const double gr = p.fn.grad_phi(0) * p.fn.grad_r(0) + p.fn.grad_phi(1) * p.fn.grad_r(1);
    out.f[c] = p.fn.lap_f + sq(s.phi[c]) - g2 / R;
    out.defined[c] = 1;
    const double term = sq(lap_phi[c] - gr / R + s.phi[c] * R) / R;
    out.rhs_no_lap[c] = R * out.f[c] + term;
    out.scale[c] = std::max({std::abs(R * out.f[c]), term, std::abs(p.fn.lap_f + sq(s.phi[c])), g2 / R});
  });
  return out;
}

std::vector<size_t> neighbours(const SurfaceState& s, size_t c) {
  const int n = s.resolution;
  if (s.background == Background::torus) {
    const int i = static_cast<int>(c / n), j = static_cast<int>(c % n);
    auto idx = [n](int a, int b) { return static_cast<size_t>(((a % n) + n) % n) * n + ((b % n) + n) % n; };
    return {idx(i + 1, j), idx(i - 1, j), idx(i, j + 1), idx(i, j - 1)};
  }
  const int i = static_cast<int>(c);
  return {static_cast<size_t>(std::min(i + 1, n - 1)), static_cast<size_t>(std::max(i - 1, 0))};
}

}  // namespace

MonitorRecord monitor(const SurfaceState& s, const FlowConfig& cfg, const SurfaceState* previous) {
  s.validate();
  const size_t m = s.size();
  std::vector<double> r = scalar_curvature(s);
  MonitorRecord rec;
  rec.t = s.time;
  rec.gauss_bonnet = gauss_bonnet(s);
  rec.max_r = *std::max_element(r.begin(), r.end());
  rec.min_r = *std::min_element(r.begin(), r.end());

  std::vector<EigenSample> trace(m), matrix(m);
  std::vector<double> trace_scale(m, 0.0), matrix_scale(m, 0.0), nval(m, 0.0), nscale(m, 0.0);
  std::vector<char> ndef(m, 0);
  for_cells(m, [&](size_t c) {
    GridPoint p = grid_point(s, c, r);
    trace[c] = surface_trace_min_eigenvalue(p.surface);
    trace_scale[c] = std::max({std::abs(p.scalar), std::abs(p.surface.grad_phi(0)), std::abs(p.surface.grad_phi(1)),
                               std::abs(p.surface.dt_f)});
    HarnackQuadratic q = surface_matrix_quadratic(p.surface);
    matrix[c] = min_eigenvalue(q);
    matrix_scale[c] = q.scale();
    FNValue fn = fn_monitor(p.fn, cfg.eps_r);
    if (fn.defined) {
      ndef[c] = 1;
      nval[c] = fn.n;
      double h2 = 0.0;
      for (double v : p.fn.hess_phi.a) h2 += v * v;
      nscale[c] = std::max({h2, sq(p.fn.lap_phi), sq(p.scalar * p.fn.phi)});
    }
  });

  FField F = f_field(s, r, cfg.eps_r);
  auto pick = [&](const std::string& id, const std::vector<EigenSample>& e, const std::vector<double>& sc) {
    QuadraticSample q;
    q.quadratic_id = id;
    q.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < m; ++c) {
      q.scale = std::max(q.scale, sc[c]);
      if (e[c].min_eigenvalue < q.min_eigenvalue) {  // strict: lowest index wins ties
        q.min_eigenvalue = e[c].min_eigenvalue;
        q.argmin_index = c;
        q.u_norm = e[c].u_norm;
        q.w_norm = e[c].w_norm;
      }
    }
    return q;
  };
  rec.min_f = std::numeric_limits<double>::infinity();
  double f_scale = 0.0;
  size_t f_arg = 0;
  for (size_t c = 0; c < m; ++c) {
    if (!F.defined[c]) {
      ++rec.undefined_f;
      continue;
    }
    f_scale = std::max(f_scale, F.scale[c]);
    if (F.f[c] < rec.min_f) {
      rec.min_f = F.f[c];
      f_arg = c;
    }
  }
  if (rec.undefined_f == static_cast<int>(m)) rec.min_f = std::numeric_limits<double>::quiet_NaN();
  rec.min_n = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < m; ++c)
    if (ndef[c]) {
      rec.min_n = std::min(rec.min_n, nval[c]);
      rec.n_scale = std::max(rec.n_scale, nscale[c]);
    }

  for (const std::string& id : cfg.quadratics) {
    if (id == "surface_trace") {
      rec.quadratics.push_back(pick(id, trace, trace_scale));
    } else if (id == "surface_matrix") {
      rec.quadratics.push_back(pick(id, matrix, matrix_scale));
    } else if (id == "F_monitor") {
      QuadraticSample q;
      q.quadratic_id = id;
      q.min_eigenvalue = rec.min_f;
      q.argmin_index = f_arg;
      q.scale = f_scale;
      rec.quadratics.push_back(q);
    } else {
      throw ConfigError("unknown quadratic '" + id + "'");
    }
  }

  if (cfg.f_inequality && rec.undefined_f == 0) {
    // trapezoidal dF/dt over one small step
    const double dt = 0.5 * stable_dt(s, cfg);
    SurfaceState s2 = step(s, dt, cfg.phi_f_mode);
    std::vector<double> r2 = scalar_curvature(s2);
    FField F2 = f_field(s2, r2, cfg.eps_r);
    std::vector<double> lap1 = laplacian(s, F.f), lap2 = laplacian(s2, F2.f);
    double worst = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < m; ++c) {
      bool ok = F2.defined[c] && r[c] > cfg.f_residual_min_r && r2[c] > cfg.f_residual_min_r;
      for (size_t nb : neighbours(s, c)) ok = ok && r[nb] > cfg.f_residual_min_r && r2[nb] > cfg.f_residual_min_r;
      if (!ok) continue;
      const double dfdt = (F2.f[c] - F.f[c]) / dt;
      const double rhs_avg = 0.5 * (lap1[c] + F.rhs_no_lap[c] + lap2[c] + F2.rhs_no_lap[c]);
      worst = std::min(worst, dfdt - rhs_avg);
      rec.f_residual_scale = std::max({rec.f_residual_scale, std::abs(dfdt), std::abs(lap1[c]), F.scale[c]});
    }
    if (std::isfinite(worst)) rec.min_f_residual = worst;
  }

  if (previous) {
    std::vector<double> rp = scalar_curvature(*previous);
    double worst = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < m; ++c) {
      const double q1 = previous->time * (previous->time * rp[c] + 1.0);
      const double q2 = s.time * (s.time * r[c] + 1.0);
      worst = std::min(worst, q2 - q1);
      rec.monotone_scale = std::max({rec.monotone_scale, std::abs(q1), std::abs(q2)});
    }
    rec.min_monotone_delta = worst;
  }
  return rec;
}

FlowResult run_with_monitors(const SurfaceState& init, const FlowConfig& cfg) {
  init.validate();
  if (!(cfg.t_end > init.time)) throw ConfigError("t_end must exceed the initial time");
  if (cfg.monitor_stride < 1) throw ConfigError("monitor_stride must be positive");
  SurfaceState s = init;
  if (cfg.phi_f_mode == PhiFMode::closed_form_tR1) apply_closed_form(s);

  FlowResult out;
  auto persisted = [&](const MonitorRecord& r) {
    for (const QuadraticSample& q : r.quadratics) {
      if (std::isnan(q.min_eigenvalue)) continue;  // F undefined everywhere (R <= eps)
      if (!(q.min_eigenvalue >= -cfg.persistence_eps * std::max(q.scale, 1e-300))) return false;
    }
    return true;
  };
  out.series.push_back(monitor(s, cfg));
  out.hypothesis_met = persisted(out.series.front());
  const double r_init_max = out.series.front().max_r;
  const bool positive_start = out.series.front().min_r > 0.0;
  SurfaceState last_monitored = s;
  int since = 0;
  out.stop_reason = "t_end";
  out.completed = true;

  while (s.time < cfg.t_end * (1.0 - 1e-14)) {
    double dt = std::min(stable_dt(s, cfg), cfg.t_end - s.time);
    if (dt < cfg.dt_min && s.time + dt < cfg.t_end) {
      out.stop_reason = "singularity";
      out.completed = false;
      break;
    }
    SurfaceState next = step(s, dt, cfg.phi_f_mode);
    if (!all_finite(next.u) || !all_finite(next.phi) || !all_finite(next.f)) {
      out.stop_reason = "non-finite";
      out.completed = false;
      break;
    }
    s = std::move(next);
    ++out.steps;
    ++since;
    std::vector<double> r = scalar_curvature(s);
    const double rmax = *std::max_element(r.begin(), r.end());
    const bool blown = std::abs(rmax) > cfg.blowup_factor * std::max(std::abs(r_init_max), 1.0);
    const bool last = s.time >= cfg.t_end * (1.0 - 1e-14);
    if (since >= cfg.monitor_stride || last || blown) {
      out.series.push_back(monitor(s, cfg, &last_monitored));
      last_monitored = s;
      since = 0;
    }
    if (blown) {
      out.stop_reason = "singularity";
      out.completed = false;
      break;
    }
  }
  out.final_state = s;
  for (const MonitorRecord& r : out.series) {
    if (!persisted(r)) out.persisted = false;
    if (positive_start && r.min_r <= 0.0) out.curvature_sign_change = true;
  }
  return out;
}

}  // namespace lyh
