#include "lyhflow/geometry.hpp"

#include <cmath>

namespace lyh {

JTensor jet_christoffel(const JTensor& g, const JTensor& ginv, int off) {
  const int n = g.d;
  std::vector<JTensor> dg(n, JTensor(n, 2));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        dg[m](i, j) = g(i, j).d(m + off);
        dg[m](j, i) = dg[m](i, j);
      }
  JTensor gam(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        Jet s = dg[i](j, l) + dg[j](i, l) - dg[l](i, j);
        for (int k = 0; k < n; ++k) gam(k, i, j) += 0.5 * ginv(k, l) * s;
      }
      for (int k = 0; k < n; ++k) gam(k, j, i) = gam(k, i, j);
    }
  return gam;
}

JTensor jet_riemann(const JTensor& gam, int off) {
  const int n = gam.d;
  std::vector<JTensor> dgam(n, JTensor(n, 3));
  for (int m = 0; m < n; ++m)
    for (size_t f = 0; f < gam.size(); ++f) dgam[m].a[f] = gam.a[f].d(m + off);
  JTensor rm(n, 4);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (int k = 0; k < n; ++k) {
          Jet v = dgam[i](l, j, k) - dgam[j](l, i, k);
          for (int m = 0; m < n; ++m) v += gam(m, j, k) * gam(l, i, m) - gam(m, i, k) * gam(l, j, m);
          rm(l, i, j, k) = v;
        }
      }
  return rm;
}

namespace {

template <class S, class DerivFn>
Tens<S> covariant_impl(const Tens<S>& t, const std::vector<bool>& up, const Tens<S>& gam, DerivFn partial) {
  const int n = t.d;
  const int r = t.r;
  Tens<S> out(n, r + 1);
  const size_t sz = t.size();
  const size_t stride = sz;  // derivative index is the leading slot
  std::vector<size_t> pw(r, 1);
  for (int s = r - 2; s >= 0; --s) pw[s] = pw[s + 1] * n;
  for (int m = 0; m < n; ++m) {
    for (size_t f = 0; f < sz; ++f) {
      S v = partial(m, f);
      size_t rem = f;
      for (int s = 0; s < r; ++s) {
        const int is = static_cast<int>((rem / pw[s]) % n);
        const size_t base = f - static_cast<size_t>(is) * pw[s];
        for (int p = 0; p < n; ++p) {
          const S& tv = t.a[base + p * pw[s]];
          if (up[s])
            v += gam(is, m, p) * tv;
          else
            v -= gam(p, m, is) * tv;
        }
      }
      out.a[m * stride + f] = v;
    }
  }
  return out;
}

}  // namespace

JTensor jet_covariant(const JTensor& t, const std::vector<bool>& up, const JTensor& gamma, int off) {
  if (static_cast<int>(up.size()) != t.r) throw ShapeError("variance pattern does not match tensor rank");
  return covariant_impl(t, up, gamma, [&](int m, size_t f) { return t.a[f].d(m + off); });
}

Tensor covariant_from_partials(const Tensor& t, const std::vector<Tensor>& dt, const std::vector<bool>& up,
                               const Tensor& gamma) {
  if (static_cast<int>(up.size()) != t.r) throw ShapeError("variance pattern does not match tensor rank");
  return covariant_impl(t, up, gamma, [&](int m, size_t f) { return dt[m].a[f]; });
}

JTensor metric_jets(const MetricFamily& fam, double t, const std::vector<double>& x, int degree) {
  fam.check(t, x.data());
  const int n = fam.dimension;
  const int nv = n + 1;
  Jet tj = Jet::variable(nv, degree, 0, t);
  JetVec xj;
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(nv, degree, i + 1, x[i]));
  return fam.metric(tj, xj);
}

Tensor metric_at(const MetricFamily& fam, double t, const std::vector<double>& x) {
  fam.check(t, x.data());
  JetVec xj;
  for (int i = 0; i < fam.dimension; ++i) xj.emplace_back(x[i]);
  return values(fam.metric(Jet(t), xj));
}

JetGeometry jet_geometry(const JTensor& g) {
  JetGeometry G;
  G.g = g;
  G.ginv = spd_inverse(g);
  G.gamma = jet_christoffel(g, G.ginv, 1);
  G.riem = jet_riemann(G.gamma, 1);
  G.ric = ricci_of(G.riem);
  G.ric_mixed = raise_last(G.ric, G.ginv);
  G.scalar = trace_with(G.ric, G.ginv);
  return G;
}

// ---------------------------------------------------------------------------

Coord to_coord(const ChartPoint& p) {
  Coord y{};
  y[0] = p.time;
  for (size_t i = 0; i < p.coords.size() && i < 3; ++i) y[i + 1] = p.coords[i];
  return y;
}

namespace {

std::vector<double> xs_of(const Coord& y, int n) { return std::vector<double>(y.begin() + 1, y.begin() + 1 + n); }

VecField metric_field(const MetricFamily& fam) {
  return [&fam](const Coord& y) { return metric_at(fam, y[0], xs_of(y, fam.dimension)).a; };
}

Tensor from_flat(int n, int r, std::vector<double> v) {
  Tensor t(n, r);
  t.a = std::move(v);
  return t;
}

struct MetricDerivs {
  Tensor g, ginv;
  std::vector<Tensor> dg;  // dg[m](i, j)
};

MetricDerivs metric_first(const MetricFamily& fam, const Coord& y, const DerivativeStencil& s) {
  const int n = fam.dimension;
  MetricDerivs md;
  auto f = metric_field(fam);
  md.g = from_flat(n, 2, f(y));
  md.ginv = spd_inverse(md.g);
  for (int m = 0; m < n; ++m) md.dg.push_back(from_flat(n, 2, fd_first(f, y, m + 1, s)));
  return md;
}

Tensor gamma_from(const MetricDerivs& md) {
  const int n = md.g.d;
  Tensor gam(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) v += md.ginv(k, l) * (md.dg[i](j, l) + md.dg[j](i, l) - md.dg[l](i, j));
        gam(k, i, j) = 0.5 * v;
      }
  // exact symmetry in the lower pair
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) gam(k, j, i) = gam(k, i, j);
  return gam;
}

}  // namespace

Tensor christoffels(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s) {
  s.validate();
  return gamma_from(metric_first(fam, to_coord(p), s));
}

Tensor riemann(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s) {
  s.validate();
  const int n = fam.dimension;
  const Coord y = to_coord(p);
  MetricDerivs md = metric_first(fam, y, s);
  auto f = metric_field(fam);
  // ddg[m][i] = d_m d_i g
  std::vector<std::vector<Tensor>> ddg(n, std::vector<Tensor>(n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      ddg[a][b] = from_flat(n, 2, fd_mixed(f, y, a + 1, b + 1, s));
      ddg[b][a] = ddg[a][b];
    }
  Tensor gam = gamma_from(md);
  // d_m Gamma^k_ij
  std::vector<Tensor> dgam(n, Tensor(n, 3));
  for (int m = 0; m < n; ++m) {
    Tensor dginv(n, 2);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) dginv(k, l) -= md.ginv(k, a) * md.dg[m](a, b) * md.ginv(b, l);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int l = 0; l < n; ++l) {
            const double S = md.dg[i](j, l) + md.dg[j](i, l) - md.dg[l](i, j);
            const double dS = ddg[m][i](j, l) + ddg[m][j](i, l) - ddg[m][l](i, j);
            v += dginv(k, l) * S + md.ginv(k, l) * dS;
          }
          dgam[m](k, i, j) = 0.5 * v;
        }
  }
  Tensor rm(n, 4);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (int k = 0; k < n; ++k) {
          double v = dgam[i](l, j, k) - dgam[j](l, i, k);
          for (int m = 0; m < n; ++m) v += gam(m, j, k) * gam(l, i, m) - gam(m, i, k) * gam(l, j, m);
          rm(l, i, j, k) = v;
        }
      }
  return rm;
}

RicciScalar ricci_and_scalar(const MetricFamily& fam, const ChartPoint& p, const DerivativeStencil& s) {
  Tensor rm = riemann(fam, p, s);
  RicciScalar out;
  out.ricci = ricci_of(rm);
  Tensor ginv = spd_inverse(metric_at(fam, p.time, p.coords));
  out.scalar = trace_with(out.ricci, ginv);
  return out;
}

// ---------------------------------------------------------------------------

Tensor exterior_derivative(const TensorField& form, int k, const Coord& y, const DerivativeStencil& s) {
  Tensor w0 = form(y);
  const int n = w0.d;
  if (w0.r != k) throw ShapeError("form rank does not match degree");
  VecField vf = [&form](const Coord& z) { return form(z).a; };
  std::vector<Tensor> dw;
  for (int m = 0; m < n; ++m) dw.push_back(from_flat(n, k, fd_first(vf, y, m + 1, s)));
  Tensor out(n, k + 1);
  for (size_t f = 0; f < out.size(); ++f) {
    auto ix = out.unflat(f);
    double v = 0.0;
    for (int a = 0; a <= k; ++a) {
      std::vector<int> rest;
      for (int b = 0; b <= k; ++b)
        if (b != a) rest.push_back(ix[b]);
      const double comp = k == 0 ? dw[ix[a]].a[0] : dw[ix[a]].a[w0.flat_vec(rest)];
      v += (a % 2 == 0 ? 1.0 : -1.0) * comp;
    }
    out.a[f] = v;
  }
  return out;
}

namespace {

// raise every slot of a covariant tensor
Tensor raise_all(const Tensor& t, const Tensor& ginv) {
  Tensor cur = t;
  const int n = t.d;
  for (int s = 0; s < t.r; ++s) {
    Tensor next(n, t.r);
    for (size_t f = 0; f < t.size(); ++f) {
      auto ix = t.unflat(f);
      double v = 0.0;
      const int keep = ix[s];
      for (int p = 0; p < n; ++p) {
        ix[s] = p;
        v += ginv(keep, p) * cur.a[t.flat_vec(ix)];
      }
      next.a[f] = v;
    }
    cur = next;
  }
  return cur;
}

Tensor lower_all(const Tensor& t, const Tensor& g) { return raise_all(t, g); }

double sqrt_det(const Tensor& g) {
  if (g.d == 2) return std::sqrt(det2(g));
  if (g.d == 3)
    return std::sqrt(g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) -
                     g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0)) +
                     g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0)));
  throw UnsupportedError("volume density implemented for n = 2, 3");
}

}  // namespace

Tensor codifferential(const TensorField& form, int k, const MetricFamily& fam, const Coord& y,
                      const DerivativeStencil& s) {
  const int n = fam.dimension;
  if (k == 0) return Tensor(n, 0);
  // delta w_{L} = -(1/sqrt g) g_{LL'} d_p (sqrt g w^{pL'})
  VecField dens = [&](const Coord& z) {
    Tensor g = metric_at(fam, z[0], xs_of(z, n));
    Tensor ginv = spd_inverse(g);
    const double sq = sqrt_det(g);
    Tensor up = raise_all(form(z), ginv);
    for (auto& v : up.a) v *= sq;
    return up.a;
  };
  Tensor div(n, k - 1);
  for (int p = 0; p < n; ++p) {
    Tensor dp = from_flat(n, k, fd_first(dens, y, p + 1, s));
    for (size_t f = 0; f < div.size(); ++f) div.a[f] += dp.a[static_cast<size_t>(p) * div.size() + f];
  }
  Tensor g = metric_at(fam, y[0], xs_of(y, n));
  const double sq = sqrt_det(g);
  for (auto& v : div.a) v = -v / sq;
  return lower_all(div, g);
}

Tensor hodge_laplacian(const TensorField& form, int k, const MetricFamily& fam, const ChartPoint& p,
                       const DerivativeStencil& s) {
  s.validate();
  if (k < 0 || k > 2) throw UnsupportedError("Hodge Laplacian supports degrees 0, 1, 2");
  const Coord y = to_coord(p);
  Tensor out(fam.dimension, k);
  if (k >= 1) {
    TensorField delta = [&](const Coord& z) { return codifferential(form, k, fam, z, s); };
    Tensor ddelta = exterior_derivative(delta, k - 1, y, s);
    for (size_t f = 0; f < out.size(); ++f) out.a[f] -= ddelta.a[f];
  }
  if (k + 1 <= fam.dimension) {
    TensorField dw = [&](const Coord& z) { return exterior_derivative(form, k, z, s); };
    Tensor deltad = codifferential(dw, k + 1, fam, y, s);
    for (size_t f = 0; f < out.size(); ++f) out.a[f] -= deltad.a[f];
  }
  return out;
}

namespace {

Tensor gamma_at(const MetricFamily& fam, const Coord& y, const DerivativeStencil& s) {
  return gamma_from(metric_first(fam, y, s));
}

Tensor fd_covariant_spatial(const TensorField& t, const MetricFamily& fam, const Coord& y,
                            const DerivativeStencil& s) {
  Tensor t0 = t(y);
  const int n = t0.d;
  VecField vf = [&t](const Coord& z) { return t(z).a; };
  std::vector<Tensor> dt;
  for (int m = 0; m < n; ++m) dt.push_back(from_flat(n, t0.r, fd_first(vf, y, m + 1, s)));
  return covariant_from_partials(t0, dt, std::vector<bool>(t0.r, false), gamma_at(fam, y, s));
}

}  // namespace

Tensor covariant_derivative(const TensorField& t, const MetricFamily& fam, const Coord& y,
                            const DerivativeStencil& s) {
  s.validate();
  return fd_covariant_spatial(t, fam, y, s);
}

Tensor rough_laplacian(const TensorField& t, const MetricFamily& fam, const Coord& y, const DerivativeStencil& s) {
  TensorField nab = [&](const Coord& z) { return fd_covariant_spatial(t, fam, z, s); };
  Tensor nn = fd_covariant_spatial(nab, fam, y, s);
  const int n = nn.d;
  Tensor ginv = spd_inverse(metric_at(fam, y[0], xs_of(y, n)));
  const int r = nn.r - 2;
  Tensor out(n, r);
  const size_t blk = out.size();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (size_t f = 0; f < blk; ++f) out.a[f] += ginv(p, q) * nn.a[(static_cast<size_t>(p) * n + q) * blk + f];
  return out;
}

Tensor lichnerowicz_laplacian(const TensorField& sym2, const MetricFamily& fam, const ChartPoint& p,
                              const DerivativeStencil& s) {
  s.validate();
  if (fam.dimension != 2) throw UnsupportedError("Lichnerowicz Laplacian is implemented for surfaces");
  const Coord y = to_coord(p);
  const int n = 2;
  Tensor lap = rough_laplacian(sym2, fam, y, s);
  Tensor g = metric_at(fam, p.time, p.coords);
  Tensor ginv = spd_inverse(g);
  Tensor rm = riemann(fam, p, s);
  Tensor rlow = lower_riemann(rm, g);
  Tensor rc = ricci_of(rm);
  Tensor rmix = raise_last(rc, ginv);  // R_j^l
  Tensor phi = sym2(y);
  Tensor phiup = raise_all(phi, ginv);
  Tensor out = lap;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) v += 2.0 * rlow(k, a, b, j) * phiup(a, b);
      for (int l = 0; l < n; ++l) v -= rmix(j, l) * phi(k, l) + rmix(k, l) * phi(j, l);
      out(k, j) += v;
    }
  return out;
}

KaehlerStructure2D kaehler_structure(const MetricFamily& fam, int orientation, const ChartPoint& p,
                                     const DerivativeStencil& s) {
  if (fam.dimension != 2) throw UnsupportedError("Kaehler structure is implemented for surfaces");
  if (orientation != 1 && orientation != -1) throw ConfigError("orientation must be +1 or -1");
  Tensor g = metric_at(fam, p.time, p.coords);
  Tensor ginv = spd_inverse(g);
  const double sq = std::sqrt(det2(g)) * orientation;
  Tensor eps(2, 2);
  eps(0, 1) = 1.0;
  eps(1, 0) = -1.0;
  KaehlerStructure2D K;
  K.rotation = Tensor(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j) K.rotation(i, k) += sq * eps(i, j) * ginv(j, k);
  Tensor rc = ricci_and_scalar(fam, p, s).ricci;
  K.area_form = Tensor(2, 2);
  K.ricci_form = Tensor(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        K.area_form(i, j) += K.rotation(i, k) * g(k, j);
        K.ricci_form(i, j) += K.rotation(i, k) * rc(k, j);
      }
  return K;
}

}  // namespace lyh
