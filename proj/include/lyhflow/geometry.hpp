#pragma once
// Chart calculus: Levi-Civita data, curvature, Laplacians on forms and
// symmetric 2-tensors, and the surface Kaehler structure.
//
// Index conventions (shared by every module):
//   Gamma^k_ij              stored gamma(k, i, j)
//   R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^m_jk Gamma^l_im - Gamma^m_ik Gamma^l_jm
//                            stored riem(l, i, j, k)
//   R_jk = R^l_ljk,  R_ijkl = g_lp R^p_ijk
// With these signs R_1221 = K det g on a surface.

#include <vector>

#include "lyhflow/catalog.hpp"
#include "lyhflow/fd.hpp"
#include "lyhflow/tensor.hpp"

namespace lyh {

// ---- exact (jet) layer -------------------------------------------------
// Spatial index i corresponds to jet variable i + var_offset.
JTensor jet_christoffel(const JTensor& g, const JTensor& ginv, int var_offset = 1);
JTensor jet_riemann(const JTensor& gamma, int var_offset = 1);
template <class S>
Tens<S> ricci_of(const Tens<S>& riem) {
  Tens<S> rc(riem.d, 2);
  for (int j = 0; j < riem.d; ++j)
    for (int k = 0; k < riem.d; ++k)
      for (int l = 0; l < riem.d; ++l) rc(j, k) += riem(l, l, j, k);
  return rc;
}
// mixed T_i^k = T_ij ginv^jk
template <class S>
Tens<S> raise_last(const Tens<S>& t2, const Tens<S>& ginv) {
  Tens<S> out(t2.d, 2);
  for (int i = 0; i < t2.d; ++i)
    for (int k = 0; k < t2.d; ++k)
      for (int j = 0; j < t2.d; ++j) out(i, k) += t2(i, j) * ginv(j, k);
  return out;
}
template <class S>
S trace_with(const Tens<S>& t2, const Tens<S>& ginv) {
  S s(0.0);
  for (int i = 0; i < t2.d; ++i)
    for (int j = 0; j < t2.d; ++j) s += t2(i, j) * ginv(i, j);
  return s;
}
// lower the first (contravariant) slot of R^l_ijk into the last: R_ijkl
template <class S>
Tens<S> lower_riemann(const Tens<S>& riem, const Tens<S>& g) {
  const int n = riem.d;
  Tens<S> out(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int p = 0; p < n; ++p) out(i, j, k, l) += g(l, p) * riem(p, i, j, k);
  return out;
}

// Covariant derivative with the derivative index prepended; `up[s]` marks
// contravariant slots. Derivative index m maps to jet variable m + var_offset.
JTensor jet_covariant(const JTensor& t, const std::vector<bool>& up, const JTensor& gamma, int var_offset);
// Same operation with the partial derivatives supplied (dt[m] = d_m t).
Tensor covariant_from_partials(const Tensor& t, const std::vector<Tensor>& dt, const std::vector<bool>& up,
                               const Tensor& gamma);

// Metric jets of a family at (t, x) with jet variables 0 = t, 1..n = x.
JTensor metric_jets(const MetricFamily& fam, double t, const std::vector<double>& x, int degree);
Tensor metric_at(const MetricFamily& fam, double t, const std::vector<double>& x);

struct JetGeometry {
  JTensor g, ginv, gamma, riem, ric, ric_mixed;
  Jet scalar;
};
JetGeometry jet_geometry(const JTensor& g);

// ---- finite-difference layer ------------------------------------------
using TensorField = std::function<Tensor(const Coord&)>;  // y = (t, x1..xn)

Coord to_coord(const ChartPoint& p);

Tensor christoffels(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s);
Tensor riemann(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s);
struct RicciScalar {
  Tensor ricci;
  double scalar = 0.0;
};
RicciScalar ricci_and_scalar(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s);

// k-form given by its antisymmetric components (rank k, k in {0, 1, 2}).
// Returns Delta_d form = -(d delta + delta d) form.
Tensor hodge_laplacian(const TensorField& form, int k, const MetricFamily& fam, const ChartPoint& p,
                       const DerivativeStencil& s);
Tensor exterior_derivative(const TensorField& form, int k, const Coord& y, const DerivativeStencil& s);
Tensor codifferential(const TensorField& form, int k, const MetricFamily& fam, const Coord& y,
                      const DerivativeStencil& s);
// nabla of a covariant tensor field, derivative index first
Tensor covariant_derivative(const TensorField& t, const MetricFamily& fam, const Coord& y, const DerivativeStencil& s);
// rough Laplacian g^pq nabla_p nabla_q of a covariant tensor field
Tensor rough_laplacian(const TensorField& t, const MetricFamily& fam, const Coord& y, const DerivativeStencil& s);
Tensor lichnerowicz_laplacian(const TensorField& sym2, const MetricFamily& fam, const ChartPoint& p,
                              const DerivativeStencil& s);

struct KaehlerStructure2D {
  Tensor rotation;   // J_i^k, (JX)^k = J_i^k X^i
  Tensor area_form;  // omega_ij = J_i^k g_kj
  Tensor ricci_form; // rho_ij = J_i^k R_kj
};
// orientation = +1 uses dx^1 ^ dx^2 as positive
KaehlerStructure2D kaehler_structure(const MetricFamily& fam, int orientation, const ChartPoint& p,
                                     const DerivativeStencil& s);

}  // namespace lyh
