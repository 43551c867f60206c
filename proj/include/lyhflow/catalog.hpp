#pragma once
// Closed-form Ricci-flow solutions on coordinate charts, their soliton
// vector fields, and companion scalar pairs (phi, f) for the form flows.

#include <functional>
#include <string>
#include <vector>

#include "lyhflow/jet.hpp"
#include "lyhflow/tensor.hpp"

namespace lyh {

using JetVec = std::vector<Jet>;
using JetScalarFn = std::function<Jet(const Jet& t, const JetVec& x)>;

enum class SolitonKind { steady, shrinking, expanding, none };

std::string to_string(SolitonKind k);

struct ChartPoint {
  std::vector<double> coords;
  double time = 0.0;
  std::string chart_id;
};

// Analytic time-dependent metric g_ij(x, t) on an open coordinate box, with
// optional soliton data. All evaluators work in the ordinary time t.
struct MetricFamily {
  std::string name;
  std::string description;
  int dimension = 2;
  std::vector<double> domain_lo, domain_hi;  // open chart box
  double margin = 0.05;                      // stencils must stay this far inside
  double t_lo = 0.0, t_hi = 1.0;             // open existence interval
  std::vector<double> sample_lo, sample_hi;  // where random samples are drawn
  double sample_t_lo = 0.0, sample_t_hi = 1.0;
  int derivative_order = 6;
  bool solves_flow = true;
  double length_scale = 1.0;
  double time_scale = 1.0;

  std::function<JTensor(const Jet& t, const JetVec& x)> metric;
  JetScalarFn scalar_oracle;  // exact scalar curvature, if known

  SolitonKind soliton_kind = SolitonKind::none;
  std::function<JetVec(const Jet& t, const JetVec& x)> v_lower;  // V_j, t-picture
  double mu_picture = 0.0;
  // a'(t)/a(t) for g(t) = a(t) phi_t^* g_hat (0 for steady solitons)
  std::function<double(double t)> homothety_rate;

  // companion scalars solving dphi/dt = Lap phi + R phi, df/dt = Lap f + phi^2
  JetScalarFn phi, f;
  // a solution of df/dt = Lap f (used with A = 0, E = -df)
  JetScalarFn heat_f;

  // throws DomainError when (t, x) is outside the box minus margin
  void check(double t, const double* x) const;
  ChartPoint sample(double u_t, const std::vector<double>& u_x) const;  // u in [0,1]
};

const MetricFamily& catalog(const std::string& name);
std::vector<std::string> catalog_names();
bool has_catalog(const std::string& name);

// the (lowered, t-picture) 2-form A and 1-form E of a form configuration
enum class FormKind { none, general, kaehler_full, surface_phi_f, zero_A };
std::string to_string(FormKind k);
FormKind form_kind_from_string(const std::string& s);

struct FormPair {
  FormKind provenance = FormKind::none;
  // A_ij(t, x) given the t-picture metric jets at the same point
  std::function<JTensor(const Jet& t, const JetVec& x, const JTensor& g)> a_form;
  std::function<JTensor(const Jet& t, const JetVec& x, const JTensor& g)> e_form;
  bool is_zero() const { return provenance == FormKind::none; }
};

FormPair make_form_pair(const MetricFamily& fam, FormKind kind);

// sqrt(det g) * eps_ij for a surface metric
JTensor area_form(const JTensor& g);

}  // namespace lyh
