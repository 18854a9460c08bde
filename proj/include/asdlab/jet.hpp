#pragma once

// Truncated multivariate Taylor arithmetic in the four chart coordinates.
// Jet<D> carries the value and all partial derivatives up to total order D
// at a point; closed-form metrics and test fields are written as functors
// templated on the scalar, so evaluating them on Jet inputs yields
// machine-accurate derivatives without symbolic machinery.

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace asdlab {

// make the double overloads visible to scalar-generic code in this namespace
using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sinh;
using std::sqrt;

constexpr int jet_dim(int D) { return (D + 1) * (D + 2) * (D + 3) * (D + 4) / 24; }

namespace detail {

struct MulTriple {
  std::uint16_t i, j, k;
};

// Monomial bookkeeping shared by all jets of one degree. Ordering is graded
// (total degree ascending, lexicographic within a degree) so that the
// coefficient layout of Jet<K> is a prefix of Jet<D> for K < D.
struct JetTableSet {
  int D = 0;
  int N = 0;
  std::vector<std::array<int, 4>> expo;
  std::vector<int> lookup;  // base-(D+1+1) encoded exponent -> index, -1 if absent
  std::vector<MulTriple> mul;

  explicit JetTableSet(int degree) : D(degree), N(jet_dim(degree)) {
    for (int d = 0; d <= D; ++d) {
      std::array<int, 4> e{};
      // lexicographic enumeration of exponents with total degree d
      for (e[0] = d; e[0] >= 0; --e[0])
        for (e[1] = d - e[0]; e[1] >= 0; --e[1])
          for (e[2] = d - e[0] - e[1]; e[2] >= 0; --e[2]) {
            e[3] = d - e[0] - e[1] - e[2];
            expo.push_back(e);
          }
    }
    assert(static_cast<int>(expo.size()) == N);
    lookup.assign(encode({D, D, D, D}) + 1, -1);
    for (int i = 0; i < N; ++i) lookup[encode(expo[i])] = i;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const auto &a = expo[i], &b = expo[j];
        int tot = 0;
        std::array<int, 4> s{};
        for (int t = 0; t < 4; ++t) {
          s[t] = a[t] + b[t];
          tot += s[t];
        }
        if (tot <= D)
          mul.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                         static_cast<std::uint16_t>(lookup[encode(s)])});
      }
  }

  int encode(const std::array<int, 4>& e) const {
    const int base = D + 1;
    return ((e[3] * base + e[2]) * base + e[1]) * base + e[0];
  }
  int index(const std::array<int, 4>& e) const { return lookup[encode(e)]; }
};

inline const JetTableSet& jet_tables(int D) {
  static const JetTableSet t0(0), t1(1), t2(2), t3(3), t4(4);
  switch (D) {
    case 0: return t0;
    case 1: return t1;
    case 2: return t2;
    case 3: return t3;
    default: assert(D == 4); return t4;
  }
}

}  // namespace detail

template <int D>
struct Jet {
  static constexpr int deg = D;
  static constexpr int N = jet_dim(D);
  std::array<double, N> c;

  Jet() { c.fill(0.0); }
  Jet(double v) {  // NOLINT: implicit by design, mirrors scalar promotion
    c.fill(0.0);
    c[0] = v;
  }

  double value() const { return c[0]; }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i < N; ++i) c[i] *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) {
    Jet r;
    for (int i = 0; i < N; ++i) r.c[i] = -a.c[i];
    return r;
  }
  friend Jet operator*(const Jet& a, double s) {
    Jet r = a;
    return r *= s;
  }
  friend Jet operator*(double s, const Jet& a) { return a * s; }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (const auto& t : detail::jet_tables(D).mul) r.c[t.k] += a.c[t.i] * b.c[t.j];
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend bool operator<(const Jet& a, const Jet& b) { return a.c[0] < b.c[0]; }
  friend bool operator>(const Jet& a, const Jet& b) { return a.c[0] > b.c[0]; }
};

// value() overload so generic code can read the scalar part of double or Jet
inline double value_of(double x) { return x; }
template <int D>
double value_of(const Jet<D>& x) { return x.value(); }

template <int D>
Jet<D> jet_variable(double v, int axis) {
  Jet<D> r(v);
  if constexpr (D > 0) {
    std::array<int, 4> e{};
    e[axis] = 1;
    r.c[detail::jet_tables(D).index(e)] = 1.0;
  }
  return r;
}

// Formal partial derivative, dropping one degree.
template <int D>
Jet<D - 1> jet_d(const Jet<D>& a, int axis) {
  static_assert(D >= 1);
  const auto& tin = detail::jet_tables(D);
  const auto& tout = detail::jet_tables(D - 1);
  Jet<D - 1> r;
  for (int m = 0; m < Jet<D - 1>::N; ++m) {
    auto e = tout.expo[m];
    e[axis] += 1;
    r.c[m] = (e[axis]) * a.c[tin.index(e)];
  }
  return r;
}

template <int K, int D>
Jet<K> jet_truncate(const Jet<D>& a) {
  static_assert(K <= D);
  Jet<K> r;
  for (int i = 0; i < Jet<K>::N; ++i) r.c[i] = a.c[i];
  return r;
}

// f(a) for analytic f given the scaled derivatives c[k] = f^(k)(a.value())/k!.
template <int D>
Jet<D> jet_compose(const Jet<D>& a, const std::array<double, D + 1>& cs) {
  Jet<D> n = a;
  n.c[0] = 0.0;
  Jet<D> r(cs[D]);
  for (int k = D - 1; k >= 0; --k) {
    r = r * n;
    r.c[0] += cs[k];
  }
  return r;
}

template <int D>
Jet<D> sin(const Jet<D>& a) {
  std::array<double, D + 1> cs{};
  const double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    const double d = (k % 4 == 0) ? s : (k % 4 == 1) ? co : (k % 4 == 2) ? -s : -co;
    cs[k] = d / fact;
    fact *= (k + 1);
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> cos(const Jet<D>& a) {
  std::array<double, D + 1> cs{};
  const double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    const double d = (k % 4 == 0) ? co : (k % 4 == 1) ? -s : (k % 4 == 2) ? -co : s;
    cs[k] = d / fact;
    fact *= (k + 1);
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> exp(const Jet<D>& a) {
  std::array<double, D + 1> cs{};
  const double e = std::exp(a.c[0]);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    cs[k] = e / fact;
    fact *= (k + 1);
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> sinh(const Jet<D>& a) {
  std::array<double, D + 1> cs{};
  const double sh = std::sinh(a.c[0]), ch = std::cosh(a.c[0]);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    cs[k] = ((k % 2 == 0) ? sh : ch) / fact;
    fact *= (k + 1);
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> cosh(const Jet<D>& a) {
  std::array<double, D + 1> cs{};
  const double sh = std::sinh(a.c[0]), ch = std::cosh(a.c[0]);
  double fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    cs[k] = ((k % 2 == 0) ? ch : sh) / fact;
    fact *= (k + 1);
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> sqrt(const Jet<D>& a) {
  assert(a.c[0] > 0.0);
  std::array<double, D + 1> cs{};
  const double s = std::sqrt(a.c[0]);
  // s * binom(1/2, k) / a0^k
  // c_k = c_{k-1} * (1/2 - (k-1)) / (k a0)
  double coef = s;
  cs[0] = coef;
  double p = 0.5;
  for (int k = 1; k <= D; ++k) {
    coef *= p / (k * a.c[0]);
    cs[k] = coef;
    p -= 1.0;
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> log(const Jet<D>& a) {
  assert(a.c[0] > 0.0);
  std::array<double, D + 1> cs{};
  cs[0] = std::log(a.c[0]);
  double sgn = 1.0;
  for (int k = 1; k <= D; ++k) {
    cs[k] = sgn / (k * std::pow(a.c[0], k));
    sgn = -sgn;
  }
  return jet_compose(a, cs);
}

template <int D>
Jet<D> inverse(const Jet<D>& a) {
  assert(a.c[0] != 0.0);
  std::array<double, D + 1> cs{};
  double v = 1.0 / a.c[0];
  for (int k = 0; k <= D; ++k) {
    cs[k] = v;
    v *= -1.0 / a.c[0];
  }
  return jet_compose(a, cs);
}
inline double inverse(double a) { return 1.0 / a; }

template <int D>
Jet<D> operator/(const Jet<D>& a, const Jet<D>& b) {
  return a * inverse(b);
}
template <int D>
Jet<D> operator/(double a, const Jet<D>& b) {
  return inverse(b) * a;
}

template <int D>
bool jet_finite(const Jet<D>& a) {
  for (double x : a.c)
    if (!std::isfinite(x)) return false;
  return true;
}
inline bool jet_finite(double a) { return std::isfinite(a); }

using Jet0 = Jet<0>;
using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;
using Jet4 = Jet<4>;

}  // namespace asdlab
