#include "lyhflow/harnack.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "lyhflow/errors.hpp"
#include "lyhflow/geometry.hpp"

namespace lyh {

namespace {

double sq(double x) { return x * x; }

template <class S>
Tens<S> raise_both(const Tens<S>& t2, const Tens<S>& ginv) {
  const int n = t2.d;
  Tens<S> out(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) out(i, j) += ginv(i, p) * ginv(j, q) * t2(p, q);
  return out;
}

Tensor vec_from(const JetVec& v) {
  Tensor out(static_cast<int>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) out.a[i] = v[i].value();
  return out;
}

Tensor raise_vec(const Tensor& v, const Tensor& ginv) {
  Tensor out(v.d, 1);
  for (int i = 0; i < v.d; ++i)
    for (int j = 0; j < v.d; ++j) out(i) += ginv(i, j) * v(j);
  return out;
}

Tensor lower_vec(const Tensor& v, const Tensor& g) { return raise_vec(v, g); }

double contract(const Tensor& a, const Tensor& x, const Tensor& y) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) s += a(i, j) * x(i) * y(j);
  return s;
}

// jets of one chart point; degree 6 fits surfaces, 4 fits 3-manifolds
struct JetLocal {
  int n = 2;
  int degree = 0;
  Jet t;
  JetVec x;
  JetGeometry G;
  JTensor rl;      // R_ijkl
  JTensor ric_up;  // R^ij
  JTensor nric;    // nabla_k R_ij
  JTensor lap_ric, grad_r, hess_r, p, m_core;
};

JetLocal jet_local(const MetricFamily& fam, const ChartPoint& pt, int degree) {
  JetLocal L;
  const int n = fam.dimension;
  L.n = n;
  L.degree = degree;
  const int nv = n + 1;
  JTensor g = metric_jets(fam, pt.time, pt.coords, degree);
  L.t = Jet::variable(nv, degree, 0, pt.time);
  for (int i = 0; i < n; ++i) L.x.push_back(Jet::variable(nv, degree, i + 1, pt.coords[i]));
  L.G = jet_geometry(g);
  const JetGeometry& G = L.G;
  L.rl = lower_riemann(G.riem, G.g);
  L.ric_up = raise_both(G.ric, G.ginv);
  L.nric = jet_covariant(G.ric, {false, false}, G.gamma, 1);
  JTensor nnric = jet_covariant(L.nric, {false, false, false}, G.gamma, 1);
  L.lap_ric = JTensor(n, 2);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) L.lap_ric(j, l) += G.ginv(p, q) * nnric(p, q, j, l);
  L.grad_r = JTensor(n, 1);
  for (int j = 0; j < n; ++j) L.grad_r(j) = G.scalar.d(j + 1);
  L.hess_r = jet_covariant(L.grad_r, {false}, G.gamma, 1);
  L.p = JTensor(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) L.p(i, j, k) = L.nric(i, j, k) - L.nric(j, i, k);
  L.m_core = JTensor(n, 2);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      Jet v = L.lap_ric(j, l) - 0.5 * L.hess_r(j, l);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) v += 2.0 * L.rl(j, p, q, l) * L.ric_up(p, q);
      for (int p = 0; p < n; ++p) v -= G.ric_mixed(j, p) * G.ric(p, l);
      L.m_core(j, l) = v;
    }
  return L;
}

int local_degree(int n) {
  if (n == 2) return 6;
  if (n == 3) return 4;
  throw UnsupportedError("pointwise jet data is available for dimensions 2 and 3");
}

template <class S>
Tens<S> laplacian(const Tens<S>& t, const JetGeometry& G) {
  std::vector<bool> up(t.r, false);
  JTensor d1 = jet_covariant(t, up, G.gamma, 1);
  up.push_back(false);
  JTensor d2 = jet_covariant(d1, up, G.gamma, 1);
  const int n = t.d;
  Tens<S> out(n, t.r);
  const size_t blk = t.size();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const size_t off = (static_cast<size_t>(p) * n + q) * blk;
      for (size_t f = 0; f < blk; ++f) out.a[f] += G.ginv(p, q) * d2.a[off + f];
    }
  return out;
}

template <class S>
Tens<S> vee_sum_impl(const Tens<S>& mixed, const Tens<S>& t) {
  if (t.r > 4) throw UnsupportedError("vee acts on tensors of rank at most 4");
  const int n = t.d;
  Tens<S> out(n, t.r);
  for (size_t f = 0; f < t.size(); ++f) {
    std::vector<int> ix = t.unflat(f);
    for (int s = 0; s < t.r; ++s) {
      const int i = ix[s];
      std::vector<int> jx = ix;
      for (int p = 0; p < n; ++p) {
        jx[s] = p;
        out.a[f] += mixed(i, p) * t.a[t.flat_vec(jx)];
      }
    }
  }
  return out;
}

double max_entry(const Tensor& t) { return max_abs(t); }

SpacetimeConnection rpm_connection(const MetricFamily& fam) {
  return build_connection(fam, 0.5, 0.0, FormPair{}, true);
}

}  // namespace

// ---------------------------------------------------------------------------

HarnackQuadratic::HarnackQuadratic(const Tensor& metric)
    : n(metric.d), rm(metric.d, 4), cross(metric.d, 3), ww(metric.d, 2), g(metric) {}

double HarnackQuadratic::evaluate(const Tensor& u, const Tensor& w) const {
  if (u.d != n || w.d != n || u.r != 2 || w.r != 1) throw ShapeError("quadratic argument shape mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (u(i, j) == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += rm(i, j, k, l) * u(i, j) * u(l, k);
    }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) s += 2.0 * cross(j, k, l) * w(j) * u(l, k);
  s += contract(ww, w, w);
  return s;
}

double HarnackQuadratic::scale() const {
  return std::max({max_abs(rm), max_abs(cross), max_abs(ww)});
}

Tensor LocalData::m(bool half_t_term) const {
  Tensor out = m_core;
  if (half_t_term) {
    if (!(t > 0.0)) throw DomainError("the R/2t term of M needs t > 0");
    for (size_t i = 0; i < out.size(); ++i) out.a[i] += ric.a[i] / (2.0 * t);
  }
  return out;
}

LocalData local_data(const MetricFamily& fam, const ChartPoint& pt, const FormPair& forms) {
  const int n = fam.dimension;
  JetLocal L = jet_local(fam, pt, local_degree(n));
  const JetGeometry& G = L.G;
  LocalData d;
  d.n = n;
  d.t = pt.time;
  d.g = values(G.g);
  d.ginv = values(G.ginv);
  d.rm = values(L.rl);
  d.ric = values(G.ric);
  d.ric_mixed = values(G.ric_mixed);
  d.scalar = G.scalar.value();
  d.dt_scalar = G.scalar.partial({0});
  d.grad_r = values(L.grad_r);
  d.hess_r = values(L.hess_r);
  d.nabla_ric = values(L.nric);
  d.lap_ric = values(L.lap_ric);
  d.p = values(L.p);
  d.m_core = values(L.m_core);

  d.a = Tensor(n, 2);
  d.nabla_a = Tensor(n, 3);
  d.div_a = Tensor(n, 1);
  d.nabla_div_a = Tensor(n, 2);
  d.e = Tensor(n, 1);
  d.nabla_e = Tensor(n, 2);
  if (forms.a_form) {
    JTensor A = forms.a_form(L.t, L.x, G.g);
    JTensor E = forms.e_form(L.t, L.x, G.g);
    JTensor nA = jet_covariant(A, {false, false}, G.gamma, 1);
    JTensor divA(n, 1);
    for (int l = 0; l < n; ++l)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) divA(l) -= G.ginv(p, q) * nA(q, p, l);
    d.a = values(A);
    d.nabla_a = values(nA);
    d.div_a = values(divA);
    d.nabla_div_a = values(jet_covariant(divA, {false}, G.gamma, 1));
    d.e = values(E);
    d.nabla_e = values(jet_covariant(E, {false}, G.gamma, 1));
  }
  if (n == 2) d.omega = values(area_form(G.g));
  return d;
}

// ---------------------------------------------------------------------------

HarnackQuadratic z_quadratic(const LocalData& d, bool half_t_term) {
  HarnackQuadratic q(d.g);
  q.rm = d.rm;
  for (int j = 0; j < d.n; ++j)
    for (int k = 0; k < d.n; ++k)
      for (int l = 0; l < d.n; ++l) q.cross(j, k, l) = d.p(l, k, j);
  q.ww = d.m(half_t_term);
  return q;
}

MPZ hamilton_mpz(const MetricFamily& fam, const ChartPoint& p, const Tensor& u, const Tensor& w, bool half_t_term) {
  if (half_t_term && !(p.time > 0.0)) throw DomainError("Z needs t > 0");
  LocalData d = local_data(fam, p);
  MPZ out;
  out.m = d.m(half_t_term);
  out.p = d.p;
  out.quadratic = z_quadratic(d, half_t_term);
  out.z = out.quadratic.evaluate(u, w);
  return out;
}

// ---------------------------------------------------------------------------

Tensor vee_elementary(const Tensor& t, int a, int b) {
  if (t.r > 4) throw UnsupportedError("vee acts on tensors of rank at most 4");
  Tensor out(t.d, t.r);
  for (size_t f = 0; f < t.size(); ++f) {
    std::vector<int> ix = t.unflat(f);
    for (int s = 0; s < t.r; ++s) {
      if (ix[s] != a) continue;
      std::vector<int> jx = ix;
      jx[s] = b;
      out.a[f] += t.a[t.flat_vec(jx)];
    }
  }
  return out;
}

Tensor vee_sum(const Tensor& mixed, const Tensor& t) { return vee_sum_impl(mixed, t); }
JTensor vee_sum(const JTensor& mixed, const JTensor& t) { return vee_sum_impl(mixed, t); }

DtValues dt_derivative(const MetricFamily& fam, const ChartPoint& pt, const JetTensorField& field) {
  const int n = fam.dimension;
  const int deg = 3;
  JTensor g = metric_jets(fam, pt.time, pt.coords, deg);
  JetGeometry G = jet_geometry(g);
  Jet t = Jet::variable(n + 1, deg, 0, pt.time);
  JetVec x;
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(n + 1, deg, i + 1, pt.coords[i]));
  JTensor T = field(t, x, g);
  if (T.r > 4) throw UnsupportedError("D_t acts on tensors of rank at most 4");
  DtValues out;
  out.vee = values(vee_sum(G.ric_mixed, T));
  out.dt = out.vee;
  for (size_t i = 0; i < T.size(); ++i) out.dt.a[i] += T.a[i].partial({0});
  return out;
}

// ---------------------------------------------------------------------------

HamiltonResiduals hamilton_evolution_residuals(const MetricFamily& fam, const ChartPoint& pt) {
  if (fam.dimension != 2) throw UnsupportedError("Hamilton's evolution residuals need 6th-order jets (surfaces)");
  if (!(pt.time > 0.0)) throw DomainError("Hamilton's M needs t > 0");
  const int n = 2;
  JetLocal L = jet_local(fam, pt, 6);
  const JetGeometry& G = L.G;
  const Jet& t = L.t;
  double scale = 0.0;
  auto track = [&](double v) { scale = std::max(scale, std::abs(v)); };
  // D_t T - Lap T, with the size of each piece tracked so the residual is
  // measured against the terms before they cancel
  auto heat = [&](const JTensor& T) {
    JTensor v = vee_sum(G.ric_mixed, T);
    JTensor lap = laplacian(T, G);
    JTensor out(T.d, T.r);
    for (size_t i = 0; i < T.size(); ++i) {
      const Jet dt = T.a[i].d(0);
      track(dt.value());
      track(v.a[i].value());
      track(lap.a[i].value());
      out.a[i] = dt + v.a[i] - lap.a[i];
    }
    return out;
  };

  JTensor RH(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) RH(a, b, c, d) = L.rl(a, b, d, c);
  const JTensor& gi = G.ginv;

  HamiltonResiduals out;
  // Rm
  {
    JTensor lhs = heat(RH);
    JTensor B(n, 4);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e)
              for (int f = 0; f < n; ++f)
                for (int p = 0; p < n; ++p)
                  for (int q = 0; q < n; ++q) B(a, b, c, d) += gi(e, p) * gi(f, q) * RH(a, e, b, f) * RH(c, p, d, q);
    out.r = Tensor(n, 4);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            const double rhs =
                2.0 * (B(a, b, c, d) - B(a, b, d, c) + B(a, c, b, d) - B(a, d, b, c)).value();
            out.r(a, b, c, d) = lhs(a, b, c, d).value() - rhs;
            track(lhs(a, b, c, d).value());
            track(rhs);
          }
  }
  // P
  {
    JTensor lhs = heat(L.p);
    JTensor nRH = jet_covariant(RH, {false, false, false, false}, G.gamma, 1);
    out.p = Tensor(n, 3);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double rhs = 0.0;
          for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e) rhs -= 2.0 * (L.ric_up(d, e) * nRH(d, a, b, c, e)).value();
          for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e)
              for (int dd = 0; dd < n; ++dd)
                for (int ee = 0; ee < n; ++ee) {
                  const Jet w = gi(d, dd) * gi(e, ee);
                  rhs += 2.0 * (w * (RH(a, d, b, e) * L.p(dd, ee, c) + RH(a, d, c, e) * L.p(dd, b, ee) +
                                     RH(b, d, c, e) * L.p(a, dd, ee)))
                                   .value();
                }
          out.p(a, b, c) = lhs(a, b, c).value() - rhs;
          track(lhs(a, b, c).value());
          track(rhs);
        }
  }
  // M
  {
    JTensor M = L.m_core;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) M(a, b) = M(a, b) + G.ric(a, b) / (2.0 * t);
    JTensor lhs = heat(M);
    JTensor Mup = raise_both(M, gi);
    JTensor nP = jet_covariant(L.p, {false, false, false}, G.gamma, 1);
    // (Rc^2)^de
    JTensor rc2(n, 2);
    for (int d = 0; d < n; ++d)
      for (int e = 0; e < n; ++e)
        for (int c = 0; c < n; ++c)
          for (int f = 0; f < n; ++f) rc2(d, e) += L.ric_up(c, d) * G.ric(c, f) * gi(f, e);
    const double tv = pt.time;
    out.m = Tensor(n, 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet rhs(0.0);
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            rhs += 2.0 * L.ric_up(c, d) * (nP(c, d, a, b) + nP(c, d, b, a));
            rhs += 2.0 * RH(a, c, b, d) * Mup(c, d);
            rhs += 2.0 * rc2(c, d) * RH(a, c, b, d);
            for (int cc = 0; cc < n; ++cc)
              for (int dd = 0; dd < n; ++dd) {
                const Jet w = gi(c, cc) * gi(d, dd);
                rhs += 2.0 * w * L.p(a, c, d) * L.p(b, cc, dd);
                rhs -= 4.0 * w * L.p(a, c, d) * L.p(b, dd, cc);
              }
          }
        const double r = rhs.value() - G.ric(a, b).value() / (2.0 * tv * tv);
        out.m(a, b) = lhs(a, b).value() - r;
        track(lhs(a, b).value());
        track(r);
      }
  }
  out.r_max = max_entry(out.r);
  out.p_max = max_entry(out.p);
  out.m_max = max_entry(out.m);
  out.scale = scale;
  return out;
}

EquivalenceReport evolution_equivalence(const MetricFamily& fam, const ChartPoint& pt, const DerivativeStencil& s) {
  const int n = fam.dimension;
  HamiltonResiduals H = hamilton_evolution_residuals(fam, pt);
  SpacetimeConnection c = rpm_connection(fam);
  EvolutionResidual E = curvature_evolution_residual(c, picture_coord(c, pt), s, EvolutionForm::sharp);
  const double t = pt.time;
  EquivalenceReport rep;
  rep.spacetime_max = E.max_residual;
  rep.hamilton_max = std::max({H.r_max, H.p_max, H.m_max});
  rep.scale = std::max(E.scale, H.scale);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l)
          rep.mismatch = std::max(rep.mismatch, std::abs(E.residual(i + 1, j + 1, k + 1, l + 1) - H.r(i, j, l, k)));
        rep.mismatch = std::max(rep.mismatch, std::abs(E.residual(k + 1, j + 1, 0, i + 1) - t * H.p(j, k, i)));
      }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      rep.mismatch = std::max(rep.mismatch, std::abs(E.residual(i + 1, 0, 0, l + 1) - t * t * H.m(i, l)));
  return rep;
}

// ---------------------------------------------------------------------------

DictionaryReport rpm_dictionary(const MetricFamily& fam, const ChartPoint& pt, const DerivativeStencil* s) {
  if (!(pt.time > 0.0)) throw DomainError("the rescaled picture needs t > 0");
  const int n = fam.dimension;
  LocalData d = local_data(fam, pt);
  SpacetimeConnection c = rpm_connection(fam);
  const Coord y = picture_coord(c, pt);
  SpacetimeCurvature K = s ? curvature_direct(c, y, *s) : curvature_closed_form(c, y);
  const double t = pt.time;
  Tensor M = d.m(true);
  DictionaryReport rep;
  rep.scale = std::max({max_abs(d.rm) / t, max_abs(d.p), t * max_abs(M)});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l)
          rep.riemann = std::max(rep.riemann, std::abs(K.low(i + 1, j + 1, k + 1, l + 1) - d.rm(i, j, k, l) / t));
        // Rt_0jkl = P_lkj and Rt_kl0j = P_lkj
        rep.p = std::max(rep.p, std::abs(K.low(0, j + 1, k + 1, i + 1) - d.p(i, k, j)));
        rep.p = std::max(rep.p, std::abs(K.low(k + 1, i + 1, 0, j + 1) - d.p(i, k, j)));
      }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) rep.m = std::max(rep.m, std::abs(K.low(i + 1, 0, 0, l + 1) - t * M(i, l)));
  return rep;
}

double z_spacetime(const MetricFamily& fam, const ChartPoint& pt, const Tensor& u, const Tensor& w,
                   const DerivativeStencil* s) {
  SpacetimeConnection c = rpm_connection(fam);
  const Coord y = picture_coord(c, pt);
  SpacetimeCurvature K = s ? curvature_direct(c, y, *s) : curvature_closed_form(c, y);
  SpacetimeTwoVector T = lift_two_vector(u, w, LiftConvention::t_tilde, pt.time);
  return pt.time * quadratic_form(K.low, T.components, T.components);
}

// ---------------------------------------------------------------------------

Tensor soliton_two_form(const Tensor& v_lower, const Tensor& w_up, const Tensor& g) {
  const int n = g.d;
  Tensor wl = lower_vec(w_up, g);
  Tensor ul(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) ul(a, b) = 0.5 * (v_lower(a) * wl(b) - v_lower(b) * wl(a));
  return raise_both(ul, spd_inverse(g));
}

SolitonReport steady_soliton_relations(const MetricFamily& fam, const ChartPoint& pt) {
  if (fam.soliton_kind != SolitonKind::steady || !fam.v_lower)
    throw ScopeError(fam.name + " is not a steady soliton");
  const int n = fam.dimension;
  LocalData d = local_data(fam, pt);
  JetVec xs;
  for (double v : pt.coords) xs.emplace_back(v);
  Tensor vl = vec_from(fam.v_lower(Jet(pt.time), xs));
  Tensor vu = raise_vec(vl, d.ginv);

  SpacetimeConnection c = build_connection(fam, 0.0, 0.0, FormPair{}, false);
  SpacetimeCurvature K = curvature_closed_form(c, picture_coord(c, pt));
  std::vector<double> vt(n + 1, 1.0);
  for (int i = 0; i < n; ++i) vt[i + 1] = vu(i);
  SolitonReport rep;
  for (int l = 0; l <= n; ++l)
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += K.up(l, i, j, k) * vt[k];
        rep.annihilation = std::max(rep.annihilation, std::abs(s));
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        double s = d.p(a, b, cc);
        for (int e = 0; e < n; ++e) s += d.rm(a, b, cc, e) * vu(e);
        rep.p_relation = std::max(rep.p_relation, std::abs(s));
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = d.m_core(a, b);
      for (int cc = 0; cc < n; ++cc) s += d.p(cc, a, b) * vu(cc);
      rep.m_relation = std::max(rep.m_relation, std::abs(s));
    }
  rep.scale = std::max({max_abs(K.up), max_abs(d.p), max_abs(d.m_core), 1e-300});
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

void check_assumption_shapes(const AssumptionPointData& d) {
  const int n = d.n;
  auto need = [&](const Tensor& t, int r, const char* what) {
    if (t.d != n || t.r != r) throw ShapeError(std::string("assumption data: bad shape for ") + what);
  };
  need(d.g, 2, "g");
  need(d.ric, 2, "ric");
  need(d.grad_r, 1, "grad_r");
  need(d.div_ric, 1, "div_ric");
  need(d.w, 1, "w");
  need(d.dt_w, 1, "dt_w");
  need(d.lap_w, 1, "lap_w");
  need(d.nabla_w, 2, "nabla_w");
  need(d.u, 2, "u");
  need(d.dt_u, 2, "dt_u");
  need(d.lap_u, 2, "lap_u");
  need(d.nabla_u, 3, "nabla_u");
  if (!(d.t > 0.0)) throw DomainError("assumption data needs t > 0");
  double bad = 0.0, sc = 1.0;
  for (int k = 0; k < n; ++k) {
    bad = std::max(bad, std::abs(2.0 * d.div_ric(k) - d.grad_r(k)));
    sc = std::max(sc, std::abs(d.grad_r(k)));
  }
  if (bad > 1e-10 * sc) throw InvariantError("assumption data violates the contracted Bianchi identity");
}

struct AssumptionMaps {
  int n;
  double t;
  Tensor rmix, rup, ginv;
  // (t R^ip + g^ip / 2)
  double k(int i, int p) const { return t * rup(i, p) + 0.5 * ginv(i, p); }
};

SpacetimeAssumptionResiduals forward(const AssumptionMaps& m, const AssumptionResiduals& a) {
  const int n = m.n;
  SpacetimeAssumptionResiduals s;
  s.heat_0j = Tensor(n, 1);
  s.heat_ij = Tensor(n, 2);
  s.covar_k0j = Tensor(n, 2);
  s.covar_kij = a.a4;
  for (int j = 0; j < n; ++j) s.heat_0j(j) = 0.5 * a.a1(j);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) s.covar_k0j(k, j) = a.a3(k, j) / (2.0 * m.t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = m.t * a.a2(i, j);
      for (int p = 0; p < n; ++p) v += m.k(i, p) * a.a3(p, j) - m.k(j, p) * a.a3(p, i);
      s.heat_ij(i, j) = v;
    }
  return s;
}

AssumptionResiduals backward(const AssumptionMaps& m, const SpacetimeAssumptionResiduals& s) {
  const int n = m.n;
  AssumptionResiduals a;
  a.a1 = Tensor(n, 1);
  a.a2 = Tensor(n, 2);
  a.a3 = Tensor(n, 2);
  a.a4 = s.covar_kij;
  for (int j = 0; j < n; ++j) a.a1(j) = 2.0 * s.heat_0j(j);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) a.a3(k, j) = 2.0 * m.t * s.covar_k0j(k, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = s.heat_ij(i, j);
      for (int p = 0; p < n; ++p) v -= m.k(i, p) * a.a3(p, j) - m.k(j, p) * a.a3(p, i);
      a.a2(i, j) = v / m.t;
    }
  return a;
}

double diff(const AssumptionResiduals& x, const AssumptionResiduals& y) {
  return std::max({max_abs_diff(x.a1, y.a1), max_abs_diff(x.a2, y.a2), max_abs_diff(x.a3, y.a3),
                   max_abs_diff(x.a4, y.a4)});
}
double diff(const SpacetimeAssumptionResiduals& x, const SpacetimeAssumptionResiduals& y) {
  return std::max({max_abs_diff(x.heat_0j, y.heat_0j), max_abs_diff(x.heat_ij, y.heat_ij),
                   max_abs_diff(x.covar_k0j, y.covar_k0j), max_abs_diff(x.covar_kij, y.covar_kij)});
}

}  // namespace

AssumptionEquivalence assumption_equivalence(const AssumptionPointData& d) {
  check_assumption_shapes(d);
  const int n = d.n;
  const double t = d.t;
  AssumptionMaps m;
  m.n = n;
  m.t = t;
  m.ginv = spd_inverse(d.g);
  m.rmix = raise_last(d.ric, m.ginv);  // R_k^i
  m.rup = raise_both(d.ric, m.ginv);
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  AssumptionEquivalence out;
  AssumptionResiduals& a = out.direct;
  a.a1 = Tensor(n, 1);
  a.a2 = Tensor(n, 2);
  a.a3 = d.nabla_w;
  a.a4 = Tensor(n, 3);
  for (int j = 0; j < n; ++j) {
    double v = d.dt_w(j) - d.lap_w(j) - d.w(j) / t;
    for (int p = 0; p < n; ++p) v -= m.rmix(p, j) * d.w(p);
    a.a1(j) = v;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = d.dt_u(i, j) - d.lap_u(i, j);
      for (int p = 0; p < n; ++p) v -= m.rmix(p, i) * d.u(p, j) + m.rmix(p, j) * d.u(i, p);
      a.a2(i, j) = v;
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a.a4(k, i, j) = d.nabla_u(k, i, j) - 0.5 * (m.rmix(k, i) * d.w(j) - m.rmix(k, j) * d.w(i)) -
                        (delta(k, i) * d.w(j) - delta(k, j) * d.w(i)) / (4.0 * t);

  // space-time side from the connection at mu = 1/2:
  // Gt^i_k0 = -(t R_k^i + delta/2), Gt^i_00 = -(t^2/2) grad^i R, Gt^0_00 = -1/2
  Tensor G(n, 2);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) G(k, i) = -(t * m.rmix(k, i) + 0.5 * delta(k, i));
  Tensor h = raise_vec(d.grad_r, m.ginv);
  for (auto& v : h.a) v *= -0.5 * t * t;
  Tensor divr_up = raise_vec(d.div_ric, m.ginv);
  Tensor tau(n, 1);  // Tt^0j
  for (int j = 0; j < n; ++j) tau(j) = d.w(j) / (2.0 * t);

  SpacetimeAssumptionResiduals& s = out.spacetime;
  s.covar_kij = Tensor(n, 3);
  s.covar_k0j = Tensor(n, 2);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      s.covar_k0j(k, j) = d.nabla_w(k, j) / (2.0 * t);
      for (int i = 0; i < n; ++i) s.covar_kij(k, i, j) = d.nabla_u(k, i, j) + G(k, i) * tau(j) - G(k, j) * tau(i);
    }
  s.heat_0j = Tensor(n, 1);
  for (int j = 0; j < n; ++j) {
    double nabla0 = (0.5 * d.dt_w(j) - d.w(j) / (2.0 * t)) - 0.5 * tau(j);
    for (int p = 0; p < n; ++p) nabla0 += G(p, j) * tau(p);
    s.heat_0j(j) = nabla0 - 0.5 * d.lap_w(j) + tau(j);
  }
  s.heat_ij = Tensor(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double nabla0 = t * d.dt_u(i, j) + h(i) * tau(j) - h(j) * tau(i);
      for (int p = 0; p < n; ++p) nabla0 += G(p, i) * d.u(p, j) + G(p, j) * d.u(i, p);
      // g^pq nabla_p (nabla~_q T^ij) + connection terms through T^0j
      double lap = d.lap_u(i, j) - t * divr_up(i) * tau(j) + t * divr_up(j) * tau(i);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          lap += m.ginv(p, q) * (G(q, i) * d.nabla_w(p, j) - G(q, j) * d.nabla_w(p, i)) / (2.0 * t);
          lap += m.ginv(p, q) * (G(p, i) * s.covar_k0j(q, j) - G(p, j) * s.covar_k0j(q, i));
        }
      s.heat_ij(i, j) = nabla0 - t * lap + d.u(i, j);
    }

  out.reconstruction_error = std::max(diff(forward(m, a), s), diff(backward(m, s), a));
  out.direct_max = std::max({max_abs(a.a1), max_abs(a.a2), max_abs(a.a3), max_abs(a.a4)});
  out.spacetime_max = std::max({max_abs(s.heat_0j), max_abs(s.heat_ij), max_abs(s.covar_k0j), max_abs(s.covar_kij)});
  return out;
}

AssumptionPointData consistent_assumption_data(int n, double t, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AssumptionPointData d;
  d.n = n;
  d.t = t;
  d.g = Tensor(n, 2);
  Tensor L(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) L(i, j) = (i == j ? 1.0 + 0.5 * std::abs(u(rng)) : 0.3 * u(rng));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) d.g(i, j) += L(i, k) * L(j, k);
  d.ric = Tensor(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) d.ric(i, j) = d.ric(j, i) = u(rng);
  d.grad_r = Tensor(n, 1);
  for (auto& v : d.grad_r.a) v = u(rng);
  d.div_ric = d.grad_r;
  for (auto& v : d.div_ric.a) v *= 0.5;
  Tensor gi = spd_inverse(d.g);
  Tensor rmix = raise_last(d.ric, gi);

  d.w = Tensor(n, 1);
  d.lap_w = Tensor(n, 1);
  for (auto& v : d.w.a) v = u(rng);
  for (auto& v : d.lap_w.a) v = u(rng);
  d.nabla_w = Tensor(n, 2);
  d.dt_w = Tensor(n, 1);
  for (int j = 0; j < n; ++j) {
    double v = d.lap_w(j) + d.w(j) / t;
    for (int p = 0; p < n; ++p) v += rmix(p, j) * d.w(p);
    d.dt_w(j) = v;
  }
  d.u = Tensor(n, 2);
  d.lap_u = Tensor(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      d.u(i, j) = u(rng);
      d.u(j, i) = -d.u(i, j);
      d.lap_u(i, j) = u(rng);
      d.lap_u(j, i) = -d.lap_u(i, j);
    }
  d.dt_u = Tensor(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = d.lap_u(i, j);
      for (int p = 0; p < n; ++p) v += rmix(p, i) * d.u(p, j) + rmix(p, j) * d.u(i, p);
      d.dt_u(i, j) = v;
    }
  d.nabla_u = Tensor(n, 3);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d.nabla_u(k, i, j) = 0.5 * (rmix(k, i) * d.w(j) - rmix(k, j) * d.w(i)) +
                             ((k == i ? d.w(j) : 0.0) - (k == j ? d.w(i) : 0.0)) / (4.0 * t);
  return d;
}

// ---------------------------------------------------------------------------

HarnackQuadratic psi_quadratic(const LocalData& d) {
  const int n = d.n;
  HarnackQuadratic q(d.g);
  q.rm = d.rm;
  q.cross = d.nabla_a;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double v = -d.nabla_e(j, l);
      for (int p = 0; p < n; ++p)
        for (int r = 0; r < n; ++r) v += d.ginv(p, r) * d.a(j, p) * d.a(l, r);
      q.ww(j, l) = v;
    }
  return q;
}

double psi_matrix(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                  const Tensor& w) {
  return psi_quadratic(local_data(fam, p, forms)).evaluate(u, w);
}

HarnackQuadratic phi_full_quadratic(const LocalData& d, double mu) {
  const int n = d.n;
  const double t = d.t;
  if (t < 0.0) throw DomainError("Phi is evaluated for t >= 0");
  HarnackQuadratic q(d.g);
  q.rm = d.rm;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        q.cross(j, k, l) = t * (d.nabla_ric(l, j, k) - d.nabla_ric(k, j, l)) + d.nabla_a(j, k, l);
  Tensor amix = raise_last(d.a, d.ginv);  // A_j^p
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double row2 = 2.0 * mu * d.ric(j, l) + 2.0 * d.nabla_div_a(j, l);
      double aa = 0.0;
      for (int p = 0; p < n; ++p) {
        row2 += amix(j, p) * d.ric(p, l) + amix(l, p) * d.ric(p, j);
        aa += amix(j, p) * d.a(p, l);
      }
      q.ww(j, l) = t * t * d.m_core(j, l) + t * row2 + mu * mu * d.g(j, l) - aa - d.nabla_e(j, l);
    }
  return q;
}

double phi_full(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                const Tensor& w) {
  return phi_full_quadratic(local_data(fam, p, forms)).evaluate(u, w);
}

double phi_full_spacetime(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                          const Tensor& w, const DerivativeStencil* s) {
  SpacetimeConnection c = build_connection(fam, 0.5, 0.5, forms, true);
  const Coord y = picture_coord(c, p);
  SpacetimeCurvature K = s ? curvature_direct(c, y, *s) : curvature_closed_form(c, y);
  SpacetimeTwoVector X = lift_two_vector(u, w, LiftConvention::x_tilde, p.time);
  return p.time * quadratic_form(K.low, X.components, X.components);
}

FormPair scaled_forms(const FormPair& forms, double lambda) {
  FormPair out = forms;
  if (!forms.a_form) return out;
  auto a = forms.a_form;
  auto e = forms.e_form;
  out.a_form = [a, lambda](const Jet& t, const JetVec& x, const JTensor& g) {
    JTensor v = a(t, x, g);
    for (auto& c : v.a) c *= lambda;
    return v;
  };
  out.e_form = [e, lambda](const Jet& t, const JetVec& x, const JTensor& g) {
    JTensor v = e(t, x, g);
    for (auto& c : v.a) c *= lambda * lambda;
    return v;
  };
  return out;
}

double phi_scaling_limit(const MetricFamily& fam, const FormPair& forms, const ChartPoint& p, const Tensor& u,
                         const Tensor& w) {
  // Phi(lambda) is a quadratic polynomial in h = 1/lambda; fit through three
  // nodes and read off h = 0
  const double lambdas[3] = {1.0, 10.0, 100.0};
  double h[3], f[3];
  for (int k = 0; k < 3; ++k) {
    h[k] = 1.0 / lambdas[k];
    Tensor wl = w;
    for (auto& c : wl.a) c *= h[k];
    f[k] = phi_full(fam, scaled_forms(forms, lambdas[k]), p, u, wl);
  }
  double lim = 0.0;
  for (int k = 0; k < 3; ++k) {
    double basis = 1.0;
    for (int m = 0; m < 3; ++m)
      if (m != k) basis *= (0.0 - h[m]) / (h[k] - h[m]);
    lim += basis * f[k];
  }
  return lim;
}

double psi_trace(const LocalData& d, const Tensor& v_lower) {
  const int n = d.n;
  Tensor vu = raise_vec(v_lower, d.ginv);
  double s = contract(d.ric, vu, vu);
  for (int l = 0; l < n; ++l) s -= 2.0 * d.div_a(l) * vu(l);
  Tensor aup = raise_both(d.a, d.ginv);
  for (size_t i = 0; i < d.a.size(); ++i) s += d.a.a[i] * aup.a[i];
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) s -= d.ginv(j, l) * d.nabla_e(j, l);
  return s;
}

namespace {
// columns are a g-orthonormal frame
Tensor orthonormal_frame(const Tensor& g) {
  const int n = g.d;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = g(i, j);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw DegeneracyError("metric is not positive definite");
  Eigen::MatrixXd Linv = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd F = Linv.transpose();
  Tensor out(n, 2);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) out(i, a) = F(i, a);
  return out;
}
}  // namespace

double psi_trace_by_frame(const LocalData& d, const Tensor& v_lower) {
  const int n = d.n;
  HarnackQuadratic q = psi_quadratic(d);
  Tensor F = orthonormal_frame(d.g);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    Tensor e(n, 1);
    for (int i = 0; i < n; ++i) e(i) = F(i, k);
    s += q.evaluate(soliton_two_form(v_lower, e, d.g), e);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {
Tensor oriented_area(const Tensor& g, int orientation) {
  Tensor w(2, 2);
  const double a = orientation * std::sqrt(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0));
  w(0, 1) = a;
  w(1, 0) = -a;
  return w;
}
}  // namespace

HarnackQuadratic surface_matrix_quadratic(const SurfacePoint& s) {
  if (s.g.d != 2) throw ShapeError("surface quadratic needs a 2x2 metric");
  HarnackQuadratic q(s.g);
  const Tensor& g = s.g;
  const double k = 0.5 * s.scalar;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int l = 0; l < 2; ++l) q.rm(i, j, a, l) = k * (g(i, l) * g(j, a) - g(i, a) * g(j, l));
  Tensor w = oriented_area(g, s.orientation);
  for (int j = 0; j < 2; ++j)
    for (int a = 0; a < 2; ++a)
      for (int l = 0; l < 2; ++l) q.cross(j, a, l) = s.grad_phi(j) * w(a, l);
  for (int j = 0; j < 2; ++j)
    for (int l = 0; l < 2; ++l) q.ww(j, l) = s.phi * s.phi * g(j, l) + 2.0 * s.hess_f(j, l);
  return q;
}

double surface_trace(const SurfacePoint& s, const Tensor& x) {
  return s.scalar * contract(s.g, x, x) + 2.0 * (s.grad_phi(0) * x(0) + s.grad_phi(1) * x(1)) + s.dt_f;
}

Tensor rotate(const LocalData& d, const Tensor& x) {
  if (d.n != 2) throw UnsupportedError("complex structure is provided for surfaces");
  Tensor J = raise_last(d.omega, d.ginv);  // J_i^k
  Tensor out(2, 1);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i) out(k) += J(i, k) * x(i);
  return out;
}

HarnackQuadratic kaehler_matrix_quadratic(const LocalData& d) {
  if (d.n != 2) throw UnsupportedError("Kaehler quadratics are provided for surfaces");
  if (!(d.t > 0.0)) throw DomainError("Kaehler quadratic needs t > 0");
  const int n = 2;
  const double t = d.t;
  HarnackQuadratic q(d.g);
  q.rm = d.rm;
  // rho = (R/2) omega on a surface, nabla rho = dR/2 (x) omega
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) q.cross(j, k, l) = 0.5 * d.grad_r(j) * d.omega(k, l);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double rc2 = 0.0;
      for (int p = 0; p < n; ++p) rc2 += d.ric_mixed(j, p) * d.ric(p, l);
      q.ww(j, l) = d.g(j, l) / (4.0 * t * t) + d.ric(j, l) / t + rc2 + 0.5 * d.hess_r(j, l);
    }
  return q;
}

double kaehler_trace(const LocalData& d, const Tensor& x) {
  const double t = d.t;
  if (!(t > 0.0)) throw DomainError("Kaehler trace needs t > 0");
  double gr = 0.0;
  for (int i = 0; i < d.n; ++i) gr += d.grad_r(i) * x(i);
  return 0.5 * t * t * (d.dt_scalar + d.scalar / t + 2.0 * gr + 2.0 * contract(d.ric, x, x)) +
         0.5 * (t * d.scalar + 0.5 * d.n);
}

// ---------------------------------------------------------------------------

double two_form_norm2(const Tensor& u, const Tensor& g) {
  const int n = g.d;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += g(i, k) * g(j, l) * u(i, j) * u(k, l);
  return s;
}

EigenSample min_eigenvalue(const HarnackQuadratic& q) {
  const int n = q.n;
  Tensor F = orthonormal_frame(q.g);
  std::vector<std::pair<Tensor, Tensor>> basis;
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Tensor u(n, 2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) u(i, j) = r2 * (F(i, a) * F(j, b) - F(i, b) * F(j, a));
      basis.emplace_back(u, Tensor(n, 1));
    }
  for (int a = 0; a < n; ++a) {
    Tensor w(n, 1);
    for (int i = 0; i < n; ++i) w(i) = F(i, a);
    basis.emplace_back(Tensor(n, 2), w);
  }
  const int K = static_cast<int>(basis.size());
  Eigen::MatrixXd M(K, K);
  std::vector<double> diag(K);
  for (int a = 0; a < K; ++a) diag[a] = q.evaluate(basis[a].first, basis[a].second);
  for (int a = 0; a < K; ++a) {
    M(a, a) = diag[a];
    for (int b = a + 1; b < K; ++b) {
      const double both = q.evaluate(basis[a].first + basis[b].first, basis[a].second + basis[b].second);
      M(a, b) = M(b, a) = 0.5 * (both - diag[a] - diag[b]);
    }
  }
  if (!M.allFinite()) throw NumericError("quadratic has non-finite coefficients");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
  EigenSample out;
  out.min_eigenvalue = es.eigenvalues()(0);
  for (int a = 0; a < K; ++a) out.eigenvalues.push_back(es.eigenvalues()(a));
  Eigen::VectorXd v = es.eigenvectors().col(0);
  // deterministic sign: largest component positive
  int big = 0;
  for (int a = 1; a < K; ++a)
    if (std::abs(v(a)) > std::abs(v(big)) + 1e-14) big = a;
  if (v(big) < 0.0) v = -v;
  out.u = Tensor(n, 2);
  out.w = Tensor(n, 1);
  for (int a = 0; a < K; ++a) {
    for (size_t i = 0; i < out.u.size(); ++i) out.u.a[i] += v(a) * basis[a].first.a[i];
    for (size_t i = 0; i < out.w.size(); ++i) out.w.a[i] += v(a) * basis[a].second.a[i];
  }
  out.u_norm = std::sqrt(two_form_norm2(out.u, q.g));
  out.w_norm = std::sqrt(std::max(0.0, contract(q.g, out.w, out.w)));
  return out;
}

EigenSample surface_trace_min_eigenvalue(const SurfacePoint& s) {
  if (s.g.d != 2 || s.grad_phi.d != 2) throw ShapeError("surface trace needs 2x2 data");
  Tensor F = orthonormal_frame(s.g);
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 2; ++a) {
    M(a, a) = s.scalar;
    double b = 0.0;
    for (int i = 0; i < 2; ++i) b += F(i, a) * s.grad_phi(i);
    M(a, 2) = M(2, a) = b;
  }
  M(2, 2) = s.dt_f;
  if (!M.allFinite()) throw NumericError("trace quadratic has non-finite coefficients");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
  EigenSample out;
  out.min_eigenvalue = es.eigenvalues()(0);
  for (int a = 0; a < 3; ++a) out.eigenvalues.push_back(es.eigenvalues()(a));
  Eigen::Vector3d v = es.eigenvectors().col(0);
  int big = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(v(a)) > std::abs(v(big)) + 1e-14) big = a;
  if (v(big) < 0.0) v = -v;
  out.w = Tensor(2, 1);
  for (int i = 0; i < 2; ++i) out.w(i) = F(i, 0) * v(0) + F(i, 1) * v(1);
  out.w_norm = std::hypot(v(0), v(1));
  out.u_norm = std::abs(v(2));
  return out;
}

// ---------------------------------------------------------------------------

FNValue fn_monitor(const FNPoint& p, double eps_r) {
  FNValue out;
  if (!(p.scalar > eps_r)) return out;
  out.defined = true;
  const int n = p.g.d;
  Tensor gi = spd_inverse(p.g);
  const double R = p.scalar;
  const double grad2 = contract(gi, p.grad_phi, p.grad_phi);
  const double phigr = contract(gi, p.grad_phi, p.grad_r);
  out.f = p.lap_f + p.phi * p.phi - grad2 / R;
  Tensor H(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = p.hess_phi(i, j) - p.grad_r(i) * p.grad_phi(j) / R;
  double h2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) h2 += gi(i, k) * gi(j, l) * H(i, j) * H(k, l);
  const double a = p.lap_phi - phigr / R;
  out.n = R * (R * p.phi * p.phi + 2.0 * p.phi * p.lap_phi) + 2.0 * (h2 - p.phi * phigr) - sq(a + p.phi * R);
  return out;
}

}  // namespace lyh
