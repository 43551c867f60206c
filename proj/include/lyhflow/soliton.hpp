#pragma once
// Verification of the soliton identities on catalog solutions: the Ricci-flow
// gate, the pointwise soliton equation, parallelism of the lifted soliton
// field, curvature annihilation along it, and the divergence identities.
//
// Point values (curvature, Ricci, metric) come from exact jets; the outermost
// derivative in each residual is taken with the supplied stencil.

#include <functional>
#include <random>
#include <vector>

#include "lyhflow/catalog.hpp"
#include "lyhflow/fd.hpp"
#include "lyhflow/tensor.hpp"

namespace lyh {

// t-picture soliton 1-form V_j; empty means the family's own field
using SolitonField = std::function<JetVec(const Jet& t, const JetVec& x)>;

struct FlowGate {
  double max_residual = 0.0;  // max |dg/dt + 2 Rc|
  double scale = 0.0;
};
FlowGate ricci_flow_residual(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s);

struct SolitonEquationReport {
  double equation = 0.0;    // max |R_ij + (a'/2a) g_ij - (nabla_i V_j + nabla_j V_i)/2|
  double closedness = 0.0;  // max |nabla_i V_j - nabla_j V_i|
  double scale = 0.0;
};
SolitonEquationReport verify_soliton_equation(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s,
                                              const SolitonField& v = {});

// Vt = d/d(x^0) + Vbar in the picture selected by mu (0: t, 1/2: tbar = ln t),
// scaled by e^{tbar/2} when mu = 1/2. Entry (a, b) is nabla_a (scaled Vt)^b.
struct ParallelReport {
  Tensor derivative;
  double fd_max = 0.0;
  double closed_max = 0.0;
};
ParallelReport verify_parallel_v(const MetricFamily& fam, double mu, const ChartPoint& p, const DerivativeStencil& s,
                                 const SolitonField& v = {});

struct AnnihilationReport {
  double fd_max = 0.0;      // max |Rt^l_ijk Vt^k|, curvature by stencil
  double closed_max = 0.0;  // same with the closed-form curvature
  double z_max = 0.0;       // max |Z(V ^ W, W)| over the supplied W
  double z_min = 0.0;       // min Z over the supplied W
  double scale = 0.0;
};
AnnihilationReport verify_curvature_annihilates_v(const MetricFamily& fam, double mu, const ChartPoint& p,
                                                  const DerivativeStencil& s, const std::vector<Tensor>& w_samples,
                                                  const SolitonField& v = {});

// 1/2 grad R = Lap V = -Rc(V) in the t picture; the tbar-picture version is
// the same equation multiplied by t
struct DivIdentityReport {
  double grad_vs_lap = 0.0;
  double grad_vs_ric = 0.0;
  double lap_vs_ric = 0.0;
  double scale = 0.0;
  double max() const;
};
DivIdentityReport verify_div_identities(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s,
                                        const SolitonField& v = {});

// random vectors with entries in [-1, 1]
std::vector<Tensor> random_vectors(int n, int count, std::mt19937_64& rng);

}  // namespace lyh
