#pragma once
// Hamilton's quadratic Z = M(W,W) + 2P(U,W) + Rm(U,U), the operators vee and
// D_t, the dictionary between (Rm, P, M) and the space-time curvature, the
// form-coupled quadratics Psi, Phi and psi with their surface and Kaehler
// specializations, minimum-eigenvalue extraction on Lambda^2 + Lambda^1, and
// the (F, N) monitor on surfaces.
//
// Curvature convention as in geometry.hpp (R_1221 = K det g); Hamilton's
// tensor is R^H_abcd = R_abdc.

#include <optional>
#include <string>
#include <vector>

#include "lyhflow/catalog.hpp"
#include "lyhflow/spacetime.hpp"
#include "lyhflow/tensor.hpp"

namespace lyh {

// Q(U, W) = rm_ijkl U^ij U^lk + 2 cross_jkl W^j U^lk + ww_jl W^j W^l
struct HarnackQuadratic {
  int n = 2;
  Tensor rm, cross, ww;
  Tensor g;  // metric for the Lambda^2 + Lambda^1 inner product

  HarnackQuadratic() = default;
  explicit HarnackQuadratic(const Tensor& metric);
  double evaluate(const Tensor& u, const Tensor& w) const;
  double scale() const;  // largest coefficient magnitude
};

// Pointwise data of a catalog solution, exact through jets in (t, x).
struct LocalData {
  int n = 2;
  double t = 0.0;
  Tensor g, ginv;
  Tensor rm;          // R_ijkl
  Tensor ric, ric_mixed;
  double scalar = 0.0;
  double dt_scalar = 0.0;
  Tensor grad_r, hess_r;  // nabla_j R, nabla_j nabla_l R
  Tensor nabla_ric;   // nabla_k R_ij, derivative index first
  Tensor lap_ric;
  Tensor p;           // P_ijk = nabla_i R_jk - nabla_j R_ik
  Tensor m_core;      // M without the R_ij / 2t term
  // forms (zero when none supplied)
  Tensor a, nabla_a;  // A_kl, nabla_j A_kl
  Tensor div_a;       // (delta A)_l = -g^pq nabla_q A_pl
  Tensor nabla_div_a; // nabla_j (delta A)_l
  Tensor e, nabla_e;  // E_l, nabla_j E_l
  Tensor omega;       // area form (surfaces only)
  Tensor m(bool half_t_term) const;
};
LocalData local_data(const MetricFamily& fam, const ChartPoint& p, const FormPair& forms = {});

// ---- Hamilton's quadratic
struct MPZ {
  Tensor m, p;
  double z = 0.0;
  HarnackQuadratic quadratic;
};
// half_t_term = false drops R_ij / 2t (steady solitons in the t picture)
HarnackQuadratic z_quadratic(const LocalData& d, bool half_t_term = true);
MPZ hamilton_mpz(const MetricFamily& fam, const ChartPoint& p, const Tensor& u, const Tensor& w,
                 bool half_t_term = true);

// ---- vee and D_t
// (vee^a_b T)_{i1..ir} = sum_s delta^a_{i_s} T_{i1..b..ir}
Tensor vee_elementary(const Tensor& t, int a, int b);
// sum over slots of X_{i_s}^p T_{..p..}
Tensor vee_sum(const Tensor& mixed, const Tensor& t);
JTensor vee_sum(const JTensor& mixed, const JTensor& t);
using JetTensorField = std::function<JTensor(const Jet& t, const JetVec& x, const JTensor& g)>;
struct DtValues {
  Tensor vee;  // R_p^q vee T
  Tensor dt;   // D_t T = dT/dt + R vee T
};
DtValues dt_derivative(const MetricFamily& fam, const ChartPoint& p, const JetTensorField& field);

// ---- Hamilton's evolution equations (residual = lhs - rhs, Hamilton's signs)
struct HamiltonResiduals {
  Tensor r, p, m;  // R^H_abcd, P_abc, M_ab
  double r_max = 0.0, p_max = 0.0, m_max = 0.0;
  double scale = 0.0;
};
HamiltonResiduals hamilton_evolution_residuals(const MetricFamily& fam, const ChartPoint& p);

// residual of the curvature evolution at mu = 1/2 matched against the
// Hamilton residuals: Rt_ijkl <-> res_R(i,j,l,k), Rt_kl0j <-> t res_P(l,k,j),
// Rt_i00l <-> t^2 res_M(i,l)
struct EquivalenceReport {
  double spacetime_max = 0.0;
  double hamilton_max = 0.0;
  double mismatch = 0.0;
  double scale = 0.0;
};
EquivalenceReport evolution_equivalence(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s);

// Rt_ijkl = R_ijkl / t, Rt_0jkl = P_lkj, Rt_i00l = t M_il (mu = 1/2, tbar = ln t)
struct DictionaryReport {
  double riemann = 0.0, p = 0.0, m = 0.0;  // max deviations
  double scale = 0.0;
};
DictionaryReport rpm_dictionary(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil* s = nullptr);
// e^tbar Rt(T, T) with T = U + W / 2t
double z_spacetime(const MetricFamily& fam, const ChartPoint& p, const Tensor& u, const Tensor& w,
                   const DerivativeStencil* s = nullptr);

// steady soliton in the t picture: Rt^l_ijk Vt^k with Vt = d/dt + V
struct SolitonReport {
  double annihilation = 0.0;  // max |Rt^l_ijk Vt^k|
  double p_relation = 0.0;    // max |P_abc + R_abcd V^d|, chart convention
  double m_relation = 0.0;    // max |M_ab + P_cab V^c|, M without R/2t
  double scale = 0.0;
};
SolitonReport steady_soliton_relations(const MetricFamily& fam, const ChartPoint& p);
// U^ij for U_ab = (V_a W_b - V_b W_a) / 2
Tensor soliton_two_form(const Tensor& v_lower, const Tensor& w_up, const Tensor& g);

// ---- assumptions on (U, W) and their space-time form at mu = 1/2
struct AssumptionPointData {
  int n = 2;
  double t = 1.0;
  Tensor g, ric;          // lowered
  Tensor grad_r;          // nabla_k R
  Tensor div_ric;         // nabla^q R_qk; must equal grad_r / 2
  Tensor w, dt_w, lap_w;  // W^j
  Tensor nabla_w;         // nabla_k W^j
  Tensor u, dt_u, lap_u;  // U^ij
  Tensor nabla_u;         // nabla_k U^ij
};
struct AssumptionResiduals {
  Tensor a1, a2, a3, a4;  // (n), (n,n), (k,j), (k,i,j)
};
struct SpacetimeAssumptionResiduals {
  Tensor heat_0j, heat_ij, covar_k0j, covar_kij;
};
struct AssumptionEquivalence {
  AssumptionResiduals direct;
  SpacetimeAssumptionResiduals spacetime;
  double reconstruction_error = 0.0;  // both directions of the linear map
  double direct_max = 0.0, spacetime_max = 0.0;
};
AssumptionEquivalence assumption_equivalence(const AssumptionPointData& d);
// data satisfying the assumptions exactly, from the seed
AssumptionPointData consistent_assumption_data(int n, double t, uint64_t seed);

// ---- form-coupled quadratics
HarnackQuadratic psi_quadratic(const LocalData& d);
double psi_matrix(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                  const Tensor& w);
HarnackQuadratic phi_full_quadratic(const LocalData& d, double mu = 0.5);
double phi_full(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                const Tensor& w);
// e^tbar Rt(X, X), X = U + W/2, C = 1/2, B = E - 2t delta A; closed form or stencil
double phi_full_spacetime(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                          const Tensor& w, const DerivativeStencil* s = nullptr);
// (lambda A, lambda^2 E)
FormPair scaled_forms(const FormPair& forms, double lambda);
// lim Phi(lambda A, lambda^2 E, U, W / lambda) as lambda -> infinity, by
// Richardson extrapolation in 1/lambda over lambda in {1, 10, 100}
double phi_scaling_limit(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                         const Tensor& w);
// psi = Rc(V,V) - 2 (delta A)(V) + |A|^2 + delta E
double psi_trace(const LocalData& d, const Tensor& v_lower);
// sum over a g-orthonormal frame of Psi(U_k, e_k), U_k = (V ^ e_k) / 2
double psi_trace_by_frame(const LocalData& d, const Tensor& v_lower);

// surface (A = phi dS, E = -2 df)
struct SurfacePoint {
  Tensor g;          // 2x2
  double scalar = 0.0;
  double phi = 0.0;
  Tensor grad_phi;   // lowered
  Tensor hess_f;     // lowered covariant Hessian
  double dt_f = 0.0;
  int orientation = 1;
};
HarnackQuadratic surface_matrix_quadratic(const SurfacePoint& s);
double surface_trace(const SurfacePoint& s, const Tensor& x_up);  // R|X|^2 + 2<grad phi, X> + df/dt

// Kaehler surfaces (A = t rho + omega/2, E = -(t^2/2) dR)
HarnackQuadratic kaehler_matrix_quadratic(const LocalData& d);
double kaehler_trace(const LocalData& d, const Tensor& x_up);  // (t^2/2)[dR/dt + R/t + 2<dR,X> + 2Rc(X,X)] + (tR + n/2)/2
// (J X)^k = J_i^k X^i with J_i^k = omega_ij g^jk
Tensor rotate(const LocalData& d, const Tensor& x_up);

// ---- eigenvalue extraction
struct EigenSample {
  double min_eigenvalue = 0.0;
  Tensor u, w;  // argmin direction, unit norm
  double u_norm = 0.0, w_norm = 0.0;
  std::vector<double> eigenvalues;
};
// orthonormal basis of Lambda^2 + Lambda^1 for <U,U> = g_ik g_jl U^ij U^kl and |W|^2_g
EigenSample min_eigenvalue(const HarnackQuadratic& q);
double two_form_norm2(const Tensor& u, const Tensor& g);
// psi(X) = R|X|^2 + 2<grad phi, X> + df/dt is >= 0 for all X iff the
// homogenized form in (X, s) is; w = X part, w_norm = |X|, u_norm = |s|
EigenSample surface_trace_min_eigenvalue(const SurfacePoint& s);

// ---- (F, N) on surfaces
struct FNPoint {
  Tensor g;
  double scalar = 0.0;
  Tensor grad_r;     // lowered
  double phi = 0.0;
  Tensor grad_phi;   // lowered
  Tensor hess_phi;   // lowered covariant Hessian
  double lap_phi = 0.0;
  double lap_f = 0.0;
};
struct FNValue {
  bool defined = false;
  double f = 0.0;
  double n = 0.0;
};
FNValue fn_monitor(const FNPoint& p, double eps_r = 1e-6);

}  // namespace lyh
