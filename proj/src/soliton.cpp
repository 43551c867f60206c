#include "lyhflow/soliton.hpp"

#include <algorithm>
#include <cmath>

#include "lyhflow/errors.hpp"
#include "lyhflow/geometry.hpp"
#include "lyhflow/harnack.hpp"
#include "lyhflow/spacetime.hpp"

namespace lyh {

namespace {

std::vector<double> xs(const Coord& y, int n) { return std::vector<double>(y.begin() + 1, y.begin() + 1 + n); }

SolitonField field_of(const MetricFamily& fam, const SolitonField& v) {
  if (v) return v;
  if (fam.soliton_kind == SolitonKind::none || !fam.v_lower)
    throw ScopeError(fam.name + " carries no soliton vector field");
  return fam.v_lower;
}

Tensor v_at(const SolitonField& v, int n, double t, const std::vector<double>& x) {
  JetVec xj;
  for (double c : x) xj.emplace_back(c);
  JetVec vj = v(Jet(t), xj);
  Tensor out(n, 1);
  for (int i = 0; i < n; ++i) out(i) = vj[i].value();
  return out;
}

JetGeometry geometry_at(const MetricFamily& fam, const ChartPoint& p, int degree) {
  return jet_geometry(metric_jets(fam, p.time, p.coords, degree));
}

void check_mu(double mu) {
  if (mu != 0.0 && mu != 0.5) throw ConfigError("soliton pictures exist for mu = 0 and mu = 1/2 only");
}

SpacetimeConnection plain_connection(const MetricFamily& fam, double mu) {
  check_mu(mu);
  return build_connection(fam, mu, 0.0, {}, mu == 0.5);
}

VectorJetField lifted(const SolitonField& v, int n) {
  return [v, n](const PictureJets& pj) {
    JetVec vl = v(pj.t, pj.x);
    JTensor gi = spd_inverse(pj.gbar);
    JetVec up(n, Jet(0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) up[i] += gi(i, j) * vl[j];
    return up;
  };
}

Tensor lifted_values(const SpacetimeConnection& c, const VectorJetField& w, const Coord& y) {
  const int n = c.n();
  JetVec wv = w(picture_jets(c, y, 1));
  Tensor out(n + 1, 1);
  out(0) = 1.0;
  for (int j = 0; j < n; ++j) out(j + 1) = wv[j].value();
  return out;
}

// nabla (e^{tbar/2} Vt) from nabla Vt in the rescaled picture
void apply_scaling(Tensor& d, const Tensor& vt, double tbar) {
  const int m = d.d;
  for (int b = 0; b < m; ++b) d(0, b) += 0.5 * vt(b);
  const double e = std::exp(0.5 * tbar);
  for (auto& x : d.a) x *= e;
}

double annihilation(const Tensor& up, const Tensor& vt) {
  const int m = up.d;
  double worst = 0.0;
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += up(l, i, j, k) * vt(k);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

}  // namespace

FlowGate ricci_flow_residual(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s) {
  s.validate();
  const int n = fam.dimension;
  const Coord y = to_coord(p);
  VecField g = [&fam, n](const Coord& z) { return metric_at(fam, z[0], xs(z, n)).a; };
  std::vector<double> dg = fd_first(g, y, 0, s);
  JetGeometry G = geometry_at(fam, p, 2);
  FlowGate out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double rc = G.ric(i, j).value();
      const double d = dg[static_cast<size_t>(i * n + j)];
      out.max_residual = std::max(out.max_residual, std::abs(d + 2.0 * rc));
      out.scale = std::max({out.scale, std::abs(d), std::abs(2.0 * rc)});
    }
  return out;
}

SolitonEquationReport verify_soliton_equation(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s,
                                              const SolitonField& v) {
  const SolitonField V = field_of(fam, v);
  const int n = fam.dimension;
  TensorField vf = [&V, n](const Coord& z) { return v_at(V, n, z[0], xs(z, n)); };
  Tensor nv = covariant_derivative(vf, fam, to_coord(p), s);
  JetGeometry G = geometry_at(fam, p, 2);
  const double rate = fam.homothety_rate ? fam.homothety_rate(p.time) : 0.0;
  SolitonEquationReport out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double rc = G.ric(i, j).value();
      const double hg = 0.5 * rate * G.g(i, j).value();
      const double sym = 0.5 * (nv(i, j) + nv(j, i));
      out.equation = std::max(out.equation, std::abs(rc + hg - sym));
      out.closedness = std::max(out.closedness, std::abs(nv(i, j) - nv(j, i)));
      out.scale = std::max({out.scale, std::abs(rc), std::abs(hg), std::abs(sym)});
    }
  return out;
}

ParallelReport verify_parallel_v(const MetricFamily& fam, double mu, const ChartPoint& p, const DerivativeStencil& s,
                                 const SolitonField& v) {
  const SolitonField V = field_of(fam, v);
  SpacetimeConnection c = plain_connection(fam, mu);
  VectorJetField w = lifted(V, fam.dimension);
  const Coord y = picture_coord(c, p);
  Tensor fd = lifted_covariant_derivative(c, w, y, s);
  Tensor cl = lifted_covariant_closed(c, w, y);
  if (mu == 0.5) {
    Tensor vt = lifted_values(c, w, y);
    apply_scaling(fd, vt, y[0]);
    apply_scaling(cl, vt, y[0]);
  }
  ParallelReport out;
  out.fd_max = max_abs(fd);
  out.closed_max = max_abs(cl);
  out.derivative = fd;
  return out;
}

AnnihilationReport verify_curvature_annihilates_v(const MetricFamily& fam, double mu, const ChartPoint& p,
                                                  const DerivativeStencil& s, const std::vector<Tensor>& w_samples,
                                                  const SolitonField& v) {
  const SolitonField V = field_of(fam, v);
  const int n = fam.dimension;
  SpacetimeConnection c = plain_connection(fam, mu);
  VectorJetField w = lifted(V, n);
  const Coord y = picture_coord(c, p);
  Tensor vt = lifted_values(c, w, y);
  SpacetimeCurvature direct = curvature_direct(c, y, s);
  SpacetimeCurvature closed = curvature_closed_form(c, y);
  AnnihilationReport out;
  out.fd_max = annihilation(direct.up, vt);
  out.closed_max = annihilation(closed.up, vt);
  out.scale = max_abs(closed.up);

  if (!w_samples.empty()) {
    LocalData d = local_data(fam, p);
    HarnackQuadratic z = z_quadratic(d, mu == 0.5);
    Tensor vl = v_at(V, n, p.time, p.coords);
    out.z_min = INFINITY;
    for (const Tensor& wv : w_samples) {
      const double val = z.evaluate(soliton_two_form(vl, wv, d.g), wv);
      out.z_max = std::max(out.z_max, std::abs(val));
      out.z_min = std::min(out.z_min, val);
    }
  }
  return out;
}

double DivIdentityReport::max() const { return std::max({grad_vs_lap, grad_vs_ric, lap_vs_ric}); }

DivIdentityReport verify_div_identities(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s,
                                        const SolitonField& v) {
  const SolitonField V = field_of(fam, v);
  const int n = fam.dimension;
  const Coord y = to_coord(p);
  VecField scalar = [&fam, n](const Coord& z) {
    JetGeometry G = jet_geometry(metric_jets(fam, z[0], xs(z, n), 2));
    return std::vector<double>{G.scalar.value()};
  };
  TensorField vf = [&V, n](const Coord& z) { return v_at(V, n, z[0], xs(z, n)); };
  Tensor lap = rough_laplacian(vf, fam, y, s);
  JetGeometry G = geometry_at(fam, p, 2);
  Tensor vl = v_at(V, n, p.time, p.coords);
  DivIdentityReport out;
  for (int j = 0; j < n; ++j) {
    const double half_grad = 0.5 * fd_first(scalar, y, j + 1, s)[0];
    double rcv = 0.0;
    for (int k = 0; k < n; ++k) rcv -= G.ric_mixed(j, k).value() * vl(k);
    out.grad_vs_lap = std::max(out.grad_vs_lap, std::abs(half_grad - lap(j)));
    out.grad_vs_ric = std::max(out.grad_vs_ric, std::abs(half_grad - rcv));
    out.lap_vs_ric = std::max(out.lap_vs_ric, std::abs(lap(j) - rcv));
    out.scale = std::max({out.scale, std::abs(half_grad), std::abs(lap(j)), std::abs(rcv)});
  }
  return out;
}

std::vector<Tensor> random_vectors(int n, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Tensor> out;
  for (int k = 0; k < count; ++k) {
    Tensor t(n, 1);
    for (auto& x : t.a) x = u(rng);
    out.push_back(t);
  }
  return out;
}

}  // namespace lyh
