#include "lyhflow/jet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace lyh {

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// number of monomials of total degree <= d in v variables
int mono_count(int v, int d) { return binom(v + d, d); }

}  // namespace

JetSpace::JetSpace(int nvars) : nv_(nvars) {
  maxdeg_ = 0;
  while (mono_count(nv_, maxdeg_ + 1) <= Jet::kMaxCoef) ++maxdeg_;
  // enumerate graded monomials
  for (int d = 0; d <= maxdeg_; ++d) {
    std::vector<std::array<int8_t, Jet::kMaxVars>> level;
    std::array<int8_t, Jet::kMaxVars> e{};
    // recursive enumeration of exponent vectors summing to d, lex descending
    std::vector<int> stack;
    auto rec = [&](auto&& self, int var, int remaining) -> void {
      if (var == nv_ - 1) {
        e[var] = static_cast<int8_t>(remaining);
        level.push_back(e);
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        e[var] = static_cast<int8_t>(k);
        self(self, var + 1, remaining - k);
      }
      e[var] = 0;
    };
    if (nv_ == 0) {
      if (d == 0) level.push_back(e);
    } else {
      rec(rec, 0, d);
    }
    for (auto& m : level) {
      mono_.push_back(m);
      mdeg_.push_back(d);
    }
    count_.push_back(static_cast<int>(mono_.size()));
  }
  const int n = static_cast<int>(mono_.size());
  factw_.resize(n);
  for (int i = 0; i < n; ++i) {
    double w = 1.0;
    for (int v = 0; v < nv_; ++v)
      for (int k = 2; k <= mono_[i][v]; ++k) w *= k;
    factw_[i] = w;
  }
  // product pairs
  std::vector<Pair> all;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (mdeg_[a] + mdeg_[b] > maxdeg_) continue;
      std::array<int8_t, Jet::kMaxVars> s{};
      for (int v = 0; v < nv_; ++v) s[v] = static_cast<int8_t>(mono_[a][v] + mono_[b][v]);
      all.push_back(Pair{static_cast<int16_t>(a), static_cast<int16_t>(b),
                         static_cast<int16_t>(index_of(s))});
    }
  std::stable_sort(all.begin(), all.end(),
                   [&](const Pair& x, const Pair& y) { return mdeg_[x.out] < mdeg_[y.out]; });
  pairs_ = all;
  pair_count_.assign(maxdeg_ + 1, 0);
  for (int d = 0; d <= maxdeg_; ++d) {
    int c = 0;
    for (auto& p : pairs_)
      if (mdeg_[p.out] <= d) ++c;
    pair_count_[d] = c;
  }
  // derivative maps: d/dx_v x^e = e_v x^(e - 1_v), stored by source monomial
  deriv_.assign(static_cast<size_t>(n) * Jet::kMaxVars, DerivEntry{-1, 0.0});
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < nv_; ++v) {
      if (mono_[i][v] == 0) continue;
      auto e = mono_[i];
      e[v] = static_cast<int8_t>(e[v] - 1);
      deriv_[i * Jet::kMaxVars + v] = DerivEntry{static_cast<int16_t>(index_of(e)),
                                                 static_cast<double>(mono_[i][v])};
    }
}

int JetSpace::index_of(const std::array<int8_t, Jet::kMaxVars>& e) const {
  int d = 0;
  for (int v = 0; v < nv_; ++v) d += e[v];
  if (d > maxdeg_) return -1;
  const int lo = d == 0 ? 0 : count_[d - 1];
  for (int i = lo; i < count_[d]; ++i) {
    bool eq = true;
    for (int v = 0; v < nv_; ++v)
      if (mono_[i][v] != e[v]) {
        eq = false;
        break;
      }
    if (eq) return i;
  }
  return -1;
}

const JetSpace& JetSpace::get(int nvars) {
  static JetSpace* spaces[Jet::kMaxVars + 1] = {};
  static std::once_flag flags[Jet::kMaxVars + 1];
  if (nvars < 0 || nvars > Jet::kMaxVars) throw std::invalid_argument("jet: unsupported variable count");
  std::call_once(flags[nvars], [nvars] { spaces[nvars] = new JetSpace(nvars); });
  return *spaces[nvars];
}

Jet::Jet() : nv_(-1), deg_(0) { c_[0] = 0.0; }
Jet::Jet(double value) : nv_(-1), deg_(0) { c_[0] = value; }

Jet::Jet(int nvars, int degree, double value) : nv_(nvars), deg_(degree) {
  const auto& sp = JetSpace::get(nvars);
  if (degree > sp.max_degree()) throw std::invalid_argument("jet: degree exceeds coefficient budget");
  std::fill_n(c_.begin(), sp.count(degree), 0.0);
  c_[0] = value;
}

Jet Jet::variable(int nvars, int degree, int var, double value) {
  Jet j(nvars, degree, value);
  if (degree >= 1) {
    std::array<int8_t, kMaxVars> e{};
    e[var] = 1;
    j.c_[JetSpace::get(nvars).index_of(e)] = 1.0;
  }
  return j;
}

int Jet::size() const { return nv_ < 0 ? 1 : JetSpace::get(nv_).count(deg_); }

void Jet::promote_like(const Jet& o) {
  // a plain constant takes the space of its partner
  if (nv_ >= 0 || o.nv_ < 0) return;
  const double v = c_[0];
  nv_ = o.nv_;
  deg_ = o.deg_;
  std::fill_n(c_.begin(), JetSpace::get(nv_).count(deg_), 0.0);
  c_[0] = v;
}

Jet Jet::truncated(int degree) const {
  if (nv_ < 0 || degree >= deg_) return *this;
  Jet r = *this;
  r.deg_ = degree;
  return r;
}

Jet Jet::d(int var) const {
  if (nv_ < 0) return Jet(0.0);
  if (deg_ == 0) throw std::logic_error("jet: derivative of degree-0 jet");
  const auto& sp = JetSpace::get(nv_);
  Jet r(nv_, deg_ - 1, 0.0);
  const int n = sp.count(deg_);
  for (int i = 0; i < n; ++i) {
    const auto& de = sp.deriv(i, var);
    if (de.target >= 0) r.c_[de.target] += de.factor * c_[i];
  }
  return r;
}

double Jet::partial(std::initializer_list<int> vars) const {
  return partial(std::vector<int>(vars));
}

double Jet::partial(const std::vector<int>& vars) const {
  if (vars.empty()) return c_[0];
  if (nv_ < 0) return 0.0;
  if (static_cast<int>(vars.size()) > deg_) throw std::logic_error("jet: partial beyond degree");
  std::array<int8_t, kMaxVars> e{};
  for (int v : vars) e[v] = static_cast<int8_t>(e[v] + 1);
  const auto& sp = JetSpace::get(nv_);
  const int idx = sp.index_of(e);
  return c_[idx] * sp.factorial_weight(idx);
}

Jet& Jet::operator+=(const Jet& o) {
  promote_like(o);
  if (o.nv_ < 0) {
    c_[0] += o.c_[0];
    return *this;
  }
  if (o.deg_ < deg_) deg_ = o.deg_;
  const int n = size();
  for (int i = 0; i < n; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  promote_like(o);
  if (o.nv_ < 0) {
    c_[0] -= o.c_[0];
    return *this;
  }
  if (o.deg_ < deg_) deg_ = o.deg_;
  const int n = size();
  for (int i = 0; i < n; ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.nv_ < 0) return b * a.c_[0];
  if (b.nv_ < 0) return a * b.c_[0];
  const int deg = std::min(a.deg_, b.deg_);
  Jet r(a.nv_, deg, 0.0);
  const auto& sp = JetSpace::get(a.nv_);
  const auto& pairs = sp.pairs();
  const int np = sp.pair_count(deg);
  for (int k = 0; k < np; ++k) {
    const auto& p = pairs[k];
    r.c_[p.out] += a.c_[p.a] * b.c_[p.b];
  }
  return r;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  *this = *this * recip(o);
  return *this;
}

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  const int n = size();
  for (int i = 0; i < n; ++i) c_[i] *= s;
  return *this;
}
Jet& Jet::operator/=(double s) { return *this *= (1.0 / s); }

Jet Jet::operator-() const {
  Jet r = *this;
  r *= -1.0;
  return r;
}

Jet Jet::compose(const double* derivs) const {
  if (nv_ < 0) return Jet(derivs[0]);
  if (deg_ == 0) return Jet(nv_, 0, derivs[0]);
  Jet h = *this;
  h.c_[0] = 0.0;
  // Horner on sum_k derivs[k]/k! h^k
  double fact = 1.0;
  for (int k = 2; k <= deg_; ++k) fact *= k;
  Jet r(nv_, deg_, derivs[deg_] / fact);
  for (int k = deg_ - 1; k >= 0; --k) {
    fact = 1.0;
    for (int m = 2; m <= k; ++m) fact *= m;
    r = r * h;
    r.c_[0] += derivs[k] / fact;
  }
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) {
  Jet r = -a;
  r += s;
  return r;
}
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) { return recip(a) * s; }

namespace {
constexpr int kMaxDeriv = 8;
}

Jet exp(const Jet& a) {
  double d[kMaxDeriv];
  const double e = std::exp(a.value());
  for (double& x : d) x = e;
  return a.compose(d);
}

Jet log(const Jet& a) {
  double d[kMaxDeriv];
  const double x0 = a.value();
  d[0] = std::log(x0);
  double f = 1.0;  // (k-1)!
  for (int k = 1; k < kMaxDeriv; ++k) {
    if (k > 1) f *= (k - 1);
    d[k] = ((k % 2) ? 1.0 : -1.0) * f / std::pow(x0, k);
  }
  return a.compose(d);
}

Jet pow(const Jet& a, double p) {
  double d[kMaxDeriv];
  const double x0 = a.value();
  double coef = 1.0;
  for (int k = 0; k < kMaxDeriv; ++k) {
    d[k] = coef * std::pow(x0, p - k);
    coef *= (p - k);
  }
  return a.compose(d);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet recip(const Jet& a) {
  double d[kMaxDeriv];
  const double x0 = a.value();
  double coef = 1.0;
  for (int k = 0; k < kMaxDeriv; ++k) {
    d[k] = coef / std::pow(x0, k + 1);
    coef *= -(k + 1);
  }
  return a.compose(d);
}

Jet sin(const Jet& a) {
  double d[kMaxDeriv];
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k < kMaxDeriv; ++k) d[k] = cyc[k % 4];
  return a.compose(d);
}

Jet cos(const Jet& a) {
  double d[kMaxDeriv];
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k < kMaxDeriv; ++k) d[k] = cyc[k % 4];
  return a.compose(d);
}

Jet square(const Jet& a) { return a * a; }

}  // namespace lyh
