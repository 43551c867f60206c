#pragma once
// Dense tensors with every index ranging over the same dimension.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lyhflow/errors.hpp"
#include "lyhflow/jet.hpp"

namespace lyh {

inline int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

template <class S>
struct Tens {
  int d = 0;
  int r = 0;
  std::vector<S> a;

  Tens() = default;
  Tens(int dim, int rank) : d(dim), r(rank), a(static_cast<size_t>(ipow(dim, rank)), S(0.0)) {}
  Tens(int dim, int rank, const S& fill) : d(dim), r(rank), a(static_cast<size_t>(ipow(dim, rank)), fill) {}

  size_t size() const { return a.size(); }

  template <class... I>
  S& operator()(I... idx) {
    return a[flat(idx...)];
  }
  template <class... I>
  const S& operator()(I... idx) const {
    return a[flat(idx...)];
  }

  template <class... I>
  size_t flat(I... idx) const {
    size_t f = 0;
    ((f = f * static_cast<size_t>(d) + static_cast<size_t>(idx)), ...);
    return f;
  }

  // multi-index of a flat position
  std::vector<int> unflat(size_t f) const {
    std::vector<int> ix(r);
    for (int k = r - 1; k >= 0; --k) {
      ix[k] = static_cast<int>(f % d);
      f /= d;
    }
    return ix;
  }
  size_t flat_vec(const std::vector<int>& ix) const {
    size_t f = 0;
    for (int v : ix) f = f * d + v;
    return f;
  }
};

using Tensor = Tens<double>;
using JTensor = Tens<Jet>;

inline Tensor values(const JTensor& t) {
  Tensor out(t.d, t.r);
  for (size_t i = 0; i < t.size(); ++i) out.a[i] = t.a[i].value();
  return out;
}

inline double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Tensor& x, const Tensor& y) {
  if (x.size() != y.size()) throw ShapeError("tensor size mismatch");
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

template <class S>
Tens<S> operator-(const Tens<S>& x, const Tens<S>& y) {
  Tens<S> out = x;
  for (size_t i = 0; i < out.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

template <class S>
Tens<S> operator+(const Tens<S>& x, const Tens<S>& y) {
  Tens<S> out = x;
  for (size_t i = 0; i < out.size(); ++i) out.a[i] += y.a[i];
  return out;
}

// Inverse of a symmetric positive definite matrix (rank-2 tensor) by
// Gauss-Jordan elimination without pivoting.
template <class S>
Tens<S> spd_inverse(const Tens<S>& m) {
  const int n = m.d;
  Tens<S> a = m;
  Tens<S> inv(n, 2);
  for (int i = 0; i < n; ++i) inv(i, i) = S(1.0);
  for (int c = 0; c < n; ++c) {
    const double piv = [&] {
      if constexpr (std::is_same_v<S, Jet>) return a(c, c).value();
      else return a(c, c);
    }();
    if (!(std::abs(piv) > 1e-300)) throw DegeneracyError("singular metric");
    S ip = S(1.0) / a(c, c);
    for (int k = 0; k < n; ++k) {
      a(c, k) = a(c, k) * ip;
      inv(c, k) = inv(c, k) * ip;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      S f = a(r, c);
      for (int k = 0; k < n; ++k) {
        a(r, k) = a(r, k) - f * a(c, k);
        inv(r, k) = inv(r, k) - f * inv(c, k);
      }
    }
  }
  return inv;
}

template <class S>
S det2(const Tens<S>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

}  // namespace lyh
