#include "lyhflow/catalog.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "lyhflow/errors.hpp"

namespace lyh {

std::string to_string(SolitonKind k) {
  switch (k) {
    case SolitonKind::steady: return "steady";
    case SolitonKind::shrinking: return "shrinking";
    case SolitonKind::expanding: return "expanding";
    case SolitonKind::none: return "none";
  }
  return "none";
}

std::string to_string(FormKind k) {
  switch (k) {
    case FormKind::none: return "zero";
    case FormKind::general: return "general";
    case FormKind::kaehler_full: return "kaehler_full";
    case FormKind::surface_phi_f: return "surface_phi_f";
    case FormKind::zero_A: return "zero_A";
  }
  return "zero";
}

FormKind form_kind_from_string(const std::string& s) {
  if (s == "zero" || s == "none") return FormKind::none;
  if (s == "kaehler_full") return FormKind::kaehler_full;
  if (s == "surface_phi_f" || s == "surface") return FormKind::surface_phi_f;
  if (s == "zero_A") return FormKind::zero_A;
  if (s == "general") return FormKind::general;
  throw ConfigError("unknown form configuration '" + s + "'");
}

void MetricFamily::check(double t, const double* x) const {
  if (!(t > t_lo + margin && t < t_hi - margin))
    throw DomainError(name + ": time " + std::to_string(t) + " outside existence interval");
  for (int i = 0; i < dimension; ++i)
    if (!(x[i] > domain_lo[i] + margin && x[i] < domain_hi[i] - margin))
      throw DomainError(name + ": coordinate " + std::to_string(i) + " = " + std::to_string(x[i]) +
                        " outside chart domain");
}

ChartPoint MetricFamily::sample(double u_t, const std::vector<double>& u_x) const {
  ChartPoint p;
  p.chart_id = name;
  p.time = sample_t_lo + u_t * (sample_t_hi - sample_t_lo);
  p.coords.resize(dimension);
  for (int i = 0; i < dimension; ++i) p.coords[i] = sample_lo[i] + u_x[i] * (sample_hi[i] - sample_lo[i]);
  return p;
}

JTensor area_form(const JTensor& g) {
  if (g.d != 2) throw UnsupportedError("area form requires a surface");
  JTensor w(2, 2);
  Jet s = sqrt(det2(g));
  w(0, 1) = s;
  w(1, 0) = -s;
  return w;
}

namespace {

constexpr double kPi = std::numbers::pi;

JTensor conformal(const Jet& factor, int n) {
  JTensor g(n, 2);
  for (int i = 0; i < n; ++i) g(i, i) = factor;
  return g;
}

Jet r2(const JetVec& x) {
  Jet s = x[0] * x[0];
  for (size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

MetricFamily flat_torus() {
  MetricFamily m;
  m.name = "flat_torus";
  m.description = "flat square torus, coordinates in [0, 2pi)";
  m.domain_lo = {-10.0, -10.0};
  m.domain_hi = {10.0, 10.0};
  m.sample_lo = {0.0, 0.0};
  m.sample_hi = {2 * kPi, 2 * kPi};
  m.t_lo = 0.0;
  m.t_hi = 100.0;
  m.sample_t_lo = 0.5;
  m.sample_t_hi = 2.0;
  m.metric = [](const Jet&, const JetVec&) { return conformal(Jet(1.0), 2); };
  m.scalar_oracle = [](const Jet&, const JetVec&) { return Jet(0.0); };
  m.soliton_kind = SolitonKind::none;
  m.phi = [](const Jet& t, const JetVec& x) { return exp(-t) * sin(x[0]); };
  m.f = [](const Jet& t, const JetVec& x) { return -0.25 * exp(-2.0 * t) * (1.0 + cos(2.0 * x[0])); };
  m.heat_f = [](const Jet& t, const JetVec& x) { return exp(-t) * cos(x[1]); };
  return m;
}

MetricFamily cigar() {
  MetricFamily m;
  m.name = "cigar";
  m.description = "Hamilton's cigar soliton g = (dx^2+dy^2)/(e^{4t}+x^2+y^2)";
  m.domain_lo = {-4.0, -4.0};
  m.domain_hi = {4.0, 4.0};
  m.sample_lo = {-2.0, -2.0};
  m.sample_hi = {2.0, 2.0};
  m.t_lo = -5.0;
  m.t_hi = 5.0;
  m.sample_t_lo = 0.2;
  m.sample_t_hi = 1.5;
  m.metric = [](const Jet& t, const JetVec& x) { return conformal(recip(exp(4.0 * t) + r2(x)), 2); };
  m.scalar_oracle = [](const Jet& t, const JetVec& x) {
    Jet e = exp(4.0 * t);
    return 4.0 * e / (e + r2(x));
  };
  m.soliton_kind = SolitonKind::steady;
  m.mu_picture = 0.0;
  m.homothety_rate = [](double) { return 0.0; };
  // V_j = d_j log(e^{4t} + r^2); the sign makes R_ij = nabla_i V_j
  m.v_lower = [](const Jet& t, const JetVec& x) {
    Jet den = recip(exp(4.0 * t) + r2(x));
    return JetVec{2.0 * x[0] * den, 2.0 * x[1] * den};
  };
  auto R = m.scalar_oracle;
  m.phi = [R](const Jet& t, const JetVec& x) { return t * R(t, x) + 1.0; };
  m.f = [R](const Jet& t, const JetVec& x) { return t * t * R(t, x) + t; };
  m.heat_f = [](const Jet&, const JetVec& x) { return x[0] * x[0] - x[1] * x[1]; };
  return m;
}

MetricFamily round_sphere() {
  MetricFamily m;
  m.name = "round_sphere_2d";
  m.description = "shrinking unit sphere in stereographic coordinates, g = (1-2t) 4|dx|^2/(1+|x|^2)^2";
  m.domain_lo = {-3.0, -3.0};
  m.domain_hi = {3.0, 3.0};
  m.sample_lo = {-1.5, -1.5};
  m.sample_hi = {1.5, 1.5};
  m.t_lo = -1.0;
  m.t_hi = 0.5;
  m.margin = 0.04;
  m.sample_t_lo = 0.05;
  m.sample_t_hi = 0.35;
  m.metric = [](const Jet& t, const JetVec& x) {
    Jet q = 1.0 + r2(x);
    return conformal(4.0 * (1.0 - 2.0 * t) / (q * q), 2);
  };
  m.scalar_oracle = [](const Jet& t, const JetVec&) { return 2.0 / (1.0 - 2.0 * t); };
  m.soliton_kind = SolitonKind::shrinking;
  m.v_lower = [](const Jet&, const JetVec&) { return JetVec{Jet(0.0), Jet(0.0)}; };
  m.homothety_rate = [](double t) { return -2.0 / (1.0 - 2.0 * t); };
  auto R = m.scalar_oracle;
  m.phi = [R](const Jet& t, const JetVec& x) { return t * R(t, x) + 1.0; };
  m.f = [R](const Jet& t, const JetVec& x) { return t * t * R(t, x) + t; };
  m.heat_f = [](const Jet&, const JetVec& x) { return x[0] * x[0] - x[1] * x[1]; };
  return m;
}

MetricFamily round_sphere_polar() {
  MetricFamily m;
  m.name = "round_sphere_polar";
  m.description = "shrinking unit sphere in (theta, phi) coordinates";
  m.domain_lo = {0.0, -4.0};
  m.domain_hi = {kPi, 4.0};
  m.margin = 0.1;
  m.sample_lo = {0.5, -2.0};
  m.sample_hi = {kPi - 0.5, 2.0};
  m.t_lo = -1.0;
  m.t_hi = 0.5;
  m.sample_t_lo = 0.0;
  m.sample_t_hi = 0.3;
  m.metric = [](const Jet& t, const JetVec& x) {
    JTensor g(2, 2);
    Jet a = 1.0 - 2.0 * t;
    Jet s = sin(x[0]);
    g(0, 0) = a;
    g(1, 1) = a * s * s;
    return g;
  };
  m.scalar_oracle = [](const Jet& t, const JetVec&) { return 2.0 / (1.0 - 2.0 * t); };
  m.soliton_kind = SolitonKind::shrinking;
  m.v_lower = [](const Jet&, const JetVec&) { return JetVec{Jet(0.0), Jet(0.0)}; };
  m.homothety_rate = [](double t) { return -2.0 / (1.0 - 2.0 * t); };
  return m;
}

MetricFamily flat_gaussian() {
  MetricFamily m;
  m.name = "flat_gaussian_expanding";
  m.description = "flat plane viewed as the Gaussian expanding soliton, V_j = x_j/(2t)";
  m.domain_lo = {-4.0, -4.0};
  m.domain_hi = {4.0, 4.0};
  m.sample_lo = {-2.0, -2.0};
  m.sample_hi = {2.0, 2.0};
  m.t_lo = 0.0;
  m.t_hi = 100.0;
  m.sample_t_lo = 0.5;
  m.sample_t_hi = 2.0;
  m.metric = [](const Jet&, const JetVec&) { return conformal(Jet(1.0), 2); };
  m.scalar_oracle = [](const Jet&, const JetVec&) { return Jet(0.0); };
  m.soliton_kind = SolitonKind::expanding;
  m.mu_picture = 0.5;
  m.homothety_rate = [](double t) { return 1.0 / t; };
  m.v_lower = [](const Jet& t, const JetVec& x) {
    Jet s = recip(2.0 * t);
    return JetVec{x[0] * s, x[1] * s};
  };
  m.phi = [](const Jet& t, const JetVec& x) { return exp(-t) * sin(x[0]); };
  m.f = [](const Jet& t, const JetVec& x) { return -0.25 * exp(-2.0 * t) * (1.0 + cos(2.0 * x[0])); };
  m.heat_f = [](const Jet&, const JetVec& x) { return x[0] * x[1]; };
  return m;
}

// static (not a flow solution) conformal perturbation of the round sphere
MetricFamily perturbed_sphere() {
  MetricFamily m;
  m.name = "perturbed_sphere";
  m.description = "static conformal perturbation of the unit sphere (not a Ricci-flow solution)";
  m.domain_lo = {-3.0, -3.0};
  m.domain_hi = {3.0, 3.0};
  m.sample_lo = {-1.5, -1.5};
  m.sample_hi = {1.5, 1.5};
  m.t_lo = -1.0;
  m.t_hi = 1.0;
  m.sample_t_lo = 0.0;
  m.sample_t_hi = 0.5;
  m.solves_flow = false;
  m.metric = [](const Jet&, const JetVec& x) {
    Jet q = 1.0 + r2(x);
    Jet w = 0.15 * x[0] * x[1] / q + 0.1 * sin(x[0]);
    return conformal(4.0 * exp(2.0 * w) / (q * q), 2);
  };
  return m;
}

MetricFamily flat_chart_3d() {
  MetricFamily m;
  m.name = "flat_chart_3d";
  m.description = "flat three-dimensional chart";
  m.dimension = 3;
  m.domain_lo = {-4.0, -4.0, -4.0};
  m.domain_hi = {4.0, 4.0, 4.0};
  m.sample_lo = {-2.0, -2.0, -2.0};
  m.sample_hi = {2.0, 2.0, 2.0};
  m.t_lo = 0.0;
  m.t_hi = 100.0;
  m.sample_t_lo = 0.5;
  m.sample_t_hi = 2.0;
  m.derivative_order = 4;
  m.metric = [](const Jet&, const JetVec&) { return conformal(Jet(1.0), 3); };
  m.scalar_oracle = [](const Jet&, const JetVec&) { return Jet(0.0); };
  return m;
}

const std::map<std::string, MetricFamily>& registry() {
  static const std::map<std::string, MetricFamily> reg = [] {
    std::map<std::string, MetricFamily> r;
    for (auto m : {flat_torus(), cigar(), round_sphere(), round_sphere_polar(), flat_gaussian(),
                   perturbed_sphere(), flat_chart_3d()})
      r.emplace(m.name, m);
    return r;
  }();
  return reg;
}

}  // namespace

const MetricFamily& catalog(const std::string& name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw ConfigError("unknown catalog solution '" + name + "'");
  return it->second;
}

bool has_catalog(const std::string& name) { return registry().count(name) > 0; }

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

FormPair make_form_pair(const MetricFamily& fam, FormKind kind) {
  FormPair fp;
  fp.provenance = kind;
  const int n = fam.dimension;
  switch (kind) {
    case FormKind::none:
      return fp;
    case FormKind::general:
      throw UnsupportedError("general form pairs must be supplied explicitly");
    case FormKind::surface_phi_f: {
      if (n != 2 || !fam.phi || !fam.f) throw UnsupportedError(fam.name + ": no (phi, f) pair");
      auto phi = fam.phi;
      auto f = fam.f;
      fp.a_form = [phi](const Jet& t, const JetVec& x, const JTensor& g) {
        JTensor a = area_form(g);
        Jet p = phi(t, x);
        for (auto& v : a.a) v = v * p;
        return a;
      };
      fp.e_form = [f](const Jet& t, const JetVec& x, const JTensor&) {
        Jet fv = f(t, x);
        JTensor e(2, 1);
        for (int j = 0; j < 2; ++j) e(j) = -2.0 * fv.d(j + 1);
        return e;
      };
      return fp;
    }
    case FormKind::kaehler_full: {
      if (n != 2 || !fam.scalar_oracle) throw UnsupportedError(fam.name + ": Kaehler pair needs a surface");
      auto R = fam.scalar_oracle;
      // A = t rho + omega/2 with rho = (R/2) omega
      fp.a_form = [R](const Jet& t, const JetVec& x, const JTensor& g) {
        JTensor a = area_form(g);
        Jet c = 0.5 * (t * R(t, x) + 1.0);
        for (auto& v : a.a) v = v * c;
        return a;
      };
      fp.e_form = [R](const Jet& t, const JetVec& x, const JTensor&) {
        Jet r = R(t, x);
        JTensor e(2, 1);
        for (int j = 0; j < 2; ++j) e(j) = -0.5 * t * t * r.d(j + 1);
        return e;
      };
      return fp;
    }
    case FormKind::zero_A: {
      if (!fam.heat_f) throw UnsupportedError(fam.name + ": no heat solution for E = -df");
      auto hf = fam.heat_f;
      fp.a_form = [n](const Jet&, const JetVec&, const JTensor&) { return JTensor(n, 2); };
      fp.e_form = [hf, n](const Jet& t, const JetVec& x, const JTensor&) {
        Jet fv = hf(t, x);
        JTensor e(n, 1);
        for (int j = 0; j < n; ++j) e(j) = -1.0 * fv.d(j + 1);
        return e;
      };
      return fp;
    }
  }
  return fp;
}

}  // namespace lyh
