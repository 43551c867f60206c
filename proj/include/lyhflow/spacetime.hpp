#pragma once
// Degenerate space-time metric, the generalized connection, its curvature
// (computed by differentiating the connection and by closed formulas), the
// Lambda^2 algebra, and residuals of the space-time identities.
//
// Space-time indices run over 0..n with 0 the time direction of the active
// picture (tbar = ln t when rescaled, t otherwise); spatial index i of a
// chart tensor is space-time index i + 1.

#include <optional>
#include <string>
#include <vector>

#include "lyhflow/catalog.hpp"
#include "lyhflow/fd.hpp"
#include "lyhflow/geometry.hpp"
#include "lyhflow/tensor.hpp"

namespace lyh {

// jets of one space-time point in the active picture
struct PictureJets {
  int n = 2;
  int degree = 0;
  JetVec y;    // picture coordinates, jet variables 0..n
  Jet t;       // ordinary time
  JetVec x;    // chart coordinates
  JTensor g;   // g(t) at x
  JTensor gbar;
};

enum class Corruption { none, flip_c2, shift_g000 };

struct SpacetimeConnection {
  const MetricFamily* base = nullptr;
  double mu = 0.0;
  double c_term = 0.0;
  bool rescaled = false;
  FormPair forms;  // t-picture (A, E); B = E/s - 2 delta A
  // optional replacements in the active picture (lowered, barred components)
  std::function<JTensor(const PictureJets&)> abar_override;
  std::function<JTensor(const PictureJets&)> bbar_override;
  Corruption corruption = Corruption::none;
  double corruption_size = 0.0;

  int n() const { return base->dimension; }
  bool has_a() const { return forms.provenance != FormKind::none || static_cast<bool>(abar_override); }
  bool has_b() const { return forms.provenance != FormKind::none || static_cast<bool>(bbar_override); }
  std::string describe() const;
};

// Validates the configuration and the antisymmetry of the lowered A at probe
// samples. rescaled must be on exactly when mu = 1/2.
SpacetimeConnection build_connection(const MetricFamily& base, double mu, double c_term, const FormPair& forms,
                                     bool rescaled);

PictureJets picture_jets(const SpacetimeConnection& c, const Coord& y, int degree);
Coord picture_coord(const SpacetimeConnection& c, const ChartPoint& p);
ChartPoint chart_point(const SpacetimeConnection& c, const Coord& y);

// Closed-form data at one point, exact through jets.
struct SpacetimeJets {
  int n = 2;
  PictureJets pic;
  JTensor gbar, gbar_inv;        // spatial
  JTensor gamma_bar, riem_bar, ric_bar, ric_mixed;  // spatial
  Jet scalar_bar;
  JTensor abar, a_mixed;         // lowered Abar_ij and A_i^k
  JTensor ebar, div_abar;        // Ebar_j, (delta Abar)_k
  JTensor bbar, b_up;            // Bbar_j, B^k
  JTensor gamma_tilde;           // (n+1)^3
  JTensor curv;                  // R^l_ijk, (n+1)^4, when requested
  JTensor ricci;                 // R_jk, (n+1)^2, when requested
};
// degree >= 3 for the connection, >= 4 for curvature
SpacetimeJets spacetime_jets(const SpacetimeConnection& c, const Coord& y, int degree, bool curvature);

Tensor gtilde_inverse(const SpacetimeConnection& c, const Coord& y);  // zero time row and column
Tensor gamma_tilde(const SpacetimeConnection& c, const Coord& y);

struct SpacetimeCurvature {
  Tensor up;     // R^l_ijk
  Tensor low;    // R_ijkl per the lowering rule
  Tensor ricci;  // R_jk = R^l_ljk
  Coord at{};
};

SpacetimeCurvature curvature_direct(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);
SpacetimeCurvature curvature_closed_form(const SpacetimeConnection& c, const Coord& y);
// R_ijkl: l >= 1 -> gbar_lp R^p_ijk; l = 0, k >= 1 -> -gbar_kp R^p_ijl; k = l = 0 -> 0
Tensor lower_curvature(const Tensor& up, const Tensor& gbar);
Tensor ricci_contraction(const Tensor& up);

// ---- covariant derivatives of space-time tensor fields by finite differences
using STField = std::function<Tensor(const Coord&)>;
// derivative index first; only directions in `dirs` are differentiated, the
// other derivative slots are left as zero
Tensor fd_covariant(const STField& t, const std::vector<bool>& up, const SpacetimeConnection& c, const Coord& y,
                    const DerivativeStencil& s, const std::vector<int>& dirs);
std::vector<int> all_dirs(int n);
std::vector<int> spatial_dirs(int n);

// ---- two-vectors and the bilinear form
struct SpacetimeTwoVector {
  Tensor components;  // antisymmetric (n+1)^2, T^{ab}
  Tensor u;           // spatial 2-form part U^{ij}
  Tensor w;           // spatial part W^j
};
enum class LiftConvention { t_tilde, x_tilde };
// T^{ij} = U^{ij}; T^{0j} = -T^{j0} = w_scale W^j, with w_scale = 1/(2t) for
// T-tilde and 1/2 for X-tilde
SpacetimeTwoVector lift_two_vector(const Tensor& u, const Tensor& w, LiftConvention conv, double t);
double quadratic_form(const Tensor& low, const Tensor& s, const Tensor& t);

// ---- Lambda^2 algebra on the degenerate metric
double lambda2_inner(const Tensor& s, const Tensor& t, const Tensor& ginv);
Tensor lambda2_bracket(const Tensor& s, const Tensor& t, const Tensor& ginv);
double structure_constant(int i, int j, int a, int b, int c, int d, const Tensor& ginv);
std::vector<std::pair<int, int>> lambda2_basis(int dim);  // (a, b), a < b, lexicographic
Tensor sharp(const Tensor& f, const Tensor& g, const Tensor& ginv);
Tensor sharp_bruteforce(const Tensor& f, const Tensor& g, const Tensor& ginv);
Tensor square(const Tensor& f, const Tensor& ginv);
struct SharpSquare {
  Tensor f_sharp_g, f_square, f_sharp;
};
SharpSquare sharp_and_square(const Tensor& f, const Tensor& g, const Tensor& ginv);

// ---- identity residuals (maximum absolute componentwise residual)
double compatibility_residual(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);

using VectorJetField = std::function<JetVec(const PictureJets&)>;  // Wbar^j in the active picture
Tensor lifted_covariant_derivative(const SpacetimeConnection& c, const VectorJetField& w, const Coord& y,
                                   const DerivativeStencil& s);
Tensor lifted_covariant_closed(const SpacetimeConnection& c, const VectorJetField& w, const Coord& y);

struct BianchiResiduals {
  double first = 0.0;
  double second = 0.0;
};
BianchiResiduals bianchi_residuals(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);

struct RicciSymmetryResiduals {
  double crc1 = 0.0;                // A = 0 form, or the general-A form when A != 0
  std::optional<double> crc2;       // only for A = B = 0
};
RicciSymmetryResiduals ricci_symmetry_residuals(const SpacetimeConnection& c, const Coord& y,
                                                const DerivativeStencil& s);

double divergence_identity_residual(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);
// contraction of the divergence identity against R_0^l = 1/2 grad^l Rbar
double divergence_trace_residual(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);
double degenerate_ricci_flow_residual(const SpacetimeConnection& c, const Coord& y, const DerivativeStencil& s);

enum class EvolutionForm { sharp, b_tensor };
struct EvolutionResidual {
  Tensor residual;  // lhs - rhs, lowered (n+1)^4
  Tensor lhs;
  double max_residual = 0.0;
  double scale = 0.0;
};
EvolutionResidual curvature_evolution_residual(const SpacetimeConnection& c, const Coord& y,
                                               const DerivativeStencil& s, EvolutionForm form = EvolutionForm::sharp);
// B_ijkl = -gtilde^pq R^m_pij R_kqml
Tensor b_tensor(const Tensor& up, const Tensor& low, const Tensor& ginv);
// (A v T)_ijkl, A^q_i acting on each slot
Tensor vee_action(const Tensor& a_mixed, const Tensor& t);
Tensor a_tilde(const SpacetimeConnection& c, const Coord& y);

// pair-symmetry defects of the curvature form against dA (exact algebra on closed forms)
struct SymmetryDefects {
  double first = 0.0;   // |R_ij0l - R_0lij - (dAbar)_jil|
  double second = 0.0;  // |R_0j0l - R_0l0j - (2(C-mu)Abar_lj - d(Bbar + 2 delta Abar)_lj)|
  double first_raw = 0.0;   // |R_ij0l - R_0lij|
  double second_raw = 0.0;  // |R_0j0l - R_0l0j|
  double d_abar = 0.0;      // |dAbar|
};
SymmetryDefects symmetry_defects(const SpacetimeConnection& c, const Coord& y);

// ---- suite plumbing
struct IdentityReport {
  std::string identity_name;
  std::string configuration;
  double max_residual = 0.0;
  int sample_count = 0;
  double tolerance = 0.0;
  std::optional<double> convergence_order;
  bool exact = false;  // residual at the coarse step already at roundoff
  bool pass = false;
  double scale = 0.0;
  std::string note;  // evaluation error, when one occurred
};

double default_tolerance(double scale);

}  // namespace lyh
