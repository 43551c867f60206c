#pragma once
// Truncated multivariate Taylor series ("jets"). A jet of degree d in v
// variables stores the Taylor coefficients of a smooth function about an
// expansion point, up to total degree d. Arithmetic and elementary functions
// propagate exactly (up to truncation), which gives machine-precision
// partial derivatives of closed-form evaluators.

#include <array>
#include <cstdint>
#include <vector>

namespace lyh {

class JetSpace;

class Jet {
 public:
  static constexpr int kMaxCoef = 84;  // 3 variables at degree 6
  static constexpr int kMaxVars = 4;

  Jet();  // zero constant
  explicit Jet(double value);  // constant, compatible with any space
  Jet(int nvars, int degree, double value);

  static Jet variable(int nvars, int degree, int var, double value);

  int nvars() const { return nv_; }
  int degree() const { return deg_; }
  bool is_plain() const { return nv_ < 0; }
  double value() const { return c_[0]; }

  int size() const;
  double coef(int idx) const { return c_[idx]; }
  double& coef(int idx) { return c_[idx]; }

  // derivative of the series with respect to variable `var` (degree drops by 1)
  Jet d(int var) const;
  // value of the mixed partial derivative at the expansion point,
  // given as a list of variable indices (repetition allowed)
  double partial(std::initializer_list<int> vars) const;
  double partial(const std::vector<int>& vars) const;

  Jet truncated(int degree) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);
  Jet operator-() const;

  friend Jet operator*(const Jet& a, const Jet& b);

  // Taylor composition: f(a) = sum_k derivs[k] / k! * (a - a0)^k
  Jet compose(const double* derivs) const;

 private:
  int nv_;   // -1: plain constant that adapts to any space
  int deg_;
  std::array<double, kMaxCoef> c_;

  friend class JetSpace;
  void promote_like(const Jet& o);
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator/(Jet a, double s);
Jet operator/(double s, const Jet& a);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet recip(const Jet& a);
Jet square(const Jet& a);

// Monomial tables for one variable count, graded order (total degree, then
// lexicographic). Monomials of degree <= d form a prefix for every d, so a
// lower-degree jet is a prefix of a higher-degree one.
class JetSpace {
 public:
  static const JetSpace& get(int nvars);

  int nvars() const { return nv_; }
  int max_degree() const { return maxdeg_; }
  int count(int degree) const { return count_[degree]; }
  const std::vector<std::array<int8_t, Jet::kMaxVars>>& monomials() const { return mono_; }
  int index_of(const std::array<int8_t, Jet::kMaxVars>& e) const;
  int mono_degree(int idx) const { return mdeg_[idx]; }

  struct Pair {
    int16_t a, b, out;
  };
  // products sorted by total degree of the output
  const std::vector<Pair>& pairs() const { return pairs_; }
  int pair_count(int degree) const { return pair_count_[degree]; }

  struct DerivEntry {
    int16_t target;  // index of the reduced monomial, -1 if none
    double factor;
  };
  const DerivEntry& deriv(int idx, int var) const { return deriv_[idx * Jet::kMaxVars + var]; }

  double factorial_weight(int idx) const { return factw_[idx]; }

 private:
  explicit JetSpace(int nvars);
  int nv_;
  int maxdeg_;
  std::vector<int> count_;
  std::vector<std::array<int8_t, Jet::kMaxVars>> mono_;
  std::vector<int> mdeg_;
  std::vector<Pair> pairs_;
  std::vector<int> pair_count_;
  std::vector<DerivEntry> deriv_;
  std::vector<double> factw_;
};

}  // namespace lyh
