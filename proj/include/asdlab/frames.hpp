#pragma once

// Orthonormal coframes and the SD/ASD two-form bases they generate. The
// coframe matrix convention matches the Cholesky factor: theta(a, alpha) is
// the a-th coordinate component of the alpha-th coframe covector, so
// g_ab = sum_alpha theta(a,alpha) theta(b,alpha).

#include "asdlab/smalltensor.hpp"

namespace asdlab {

template <class T>
void sd_bases_from_coframe(const M4<T>& theta, std::array<M4<T>, 3>& sdb,
                           std::array<M4<T>, 3>& asdb) {
  auto wedge = [&](int al, int be, int a, int b) {
    return theta(a, al) * theta(b, be) - theta(a, be) * theta(b, al);
  };
  const double inv_sqrt2 = 0.7071067811865475244;
  static const int cyc[3][2] = {{2, 3}, {3, 1}, {1, 2}};
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const auto w0 = wedge(0, i + 1, a, b);
        const auto wc = wedge(cyc[i][0], cyc[i][1], a, b);
        sdb[i](a, b) = (w0 + wc) * inv_sqrt2;
        asdb[i](a, b) = (w0 - wc) * inv_sqrt2;
      }
}

// Globally smooth orthonormal coframe on S^3(1) x S^1 in Hopf coordinates
// (eta, xi1, xi2, theta): the left-invariant S^3 frame lowered with g plus
// d theta. All components are regular in the chart interior.
template <class T>
M4<T> s3xs1_coframe(const V4<T>& x) {
  const T se = sin(x[0]), ce = cos(x[0]);
  const T sd = sin(x[1] - x[2]), cd = cos(x[1] - x[2]);
  const T sc = se * ce;
  M4<T> th;
  // alpha = 0: (X1)^flat = (0, sin^2, -cos^2, 0)
  th(1, 0) = se * se;
  th(2, 0) = T(0.0) - ce * ce;
  // alpha = 1: (X2)^flat = (-cos d, sc sin d, sc sin d, 0)
  th(0, 1) = T(0.0) - cd;
  th(1, 1) = sc * sd;
  th(2, 1) = sc * sd;
  // alpha = 2: (X3)^flat = (sin d, sc cos d, sc cos d, 0)
  th(0, 2) = sd;
  th(1, 2) = sc * cd;
  th(2, 2) = sc * cd;
  // alpha = 3: d theta
  th(3, 3) = T(1.0);
  return th;
}

// Ambient coordinates of the sinh-stereographic S^4 chart and their chart
// differentials: xi_i are the five components of the unit-sphere embedding.
template <class T>
std::array<T, 5> s4_ambient(const V4<T>& s) {
  V4<T> x;
  T r2(0.0);
  for (int a = 0; a < 4; ++a) {
    x[a] = sinh(s[a]);
    r2 += x[a] * x[a];
  }
  const T den = inverse(1.0 + r2);
  std::array<T, 5> xi;
  for (int a = 0; a < 4; ++a) xi[a] = 2.0 * x[a] * den;
  xi[4] = (1.0 - r2) * den;
  return xi;
}

// d xi_i as chart covectors, i = 0..4.
template <class T>
std::array<V4<T>, 5> s4_ambient_differentials(const V4<T>& s) {
  V4<T> x, ch;
  T r2(0.0);
  for (int a = 0; a < 4; ++a) {
    x[a] = sinh(s[a]);
    ch[a] = cosh(s[a]);
    r2 += x[a] * x[a];
  }
  const T den = inverse(1.0 + r2);
  const T den2 = den * den;
  std::array<V4<T>, 5> d;
  for (int i = 0; i < 4; ++i)
    for (int b = 0; b < 4; ++b) {
      T v = T(0.0) - 4.0 * x[i] * x[b] * den2;
      if (i == b) v += 2.0 * den;
      d[i][b] = v * ch[b];
    }
  for (int b = 0; b < 4; ++b) d[4][b] = T(0.0) - 4.0 * x[b] * den2 * ch[b];
  return d;
}

// Ambient coordinates on S^3(1) x S^1: the four S^3 embedding components
// and (cos, sin) of the circle angle scaled to period `circle_len`.
template <class T>
std::array<T, 6> s3xs1_ambient(const V4<T>& x, double circle_len) {
  const T se = sin(x[0]), ce = cos(x[0]);
  std::array<T, 6> a;
  a[0] = se * cos(x[1]);
  a[1] = se * sin(x[1]);
  a[2] = ce * cos(x[2]);
  a[3] = ce * sin(x[2]);
  const double om = 2.0 * M_PI / circle_len;
  a[4] = cos(x[3] * om);
  a[5] = sin(x[3] * om);
  return a;
}

}  // namespace asdlab
