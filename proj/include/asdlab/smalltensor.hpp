#pragma once

// Small dense tensor values over an arbitrary scalar (double or Jet<D>).
// Per-site curvature algebra is written against these; Eigen handles the
// double-precision linear algebra at the field/solver level.

#include <array>
#include <cassert>

#include "asdlab/jet.hpp"

namespace asdlab {

template <class T>
struct V4 {
  std::array<T, 4> a{};
  T& operator[](int i) { return a[i]; }
  const T& operator[](int i) const { return a[i]; }
};

template <class T>
struct M4 {
  std::array<T, 16> a{};
  T& operator()(int i, int j) { return a[4 * i + j]; }
  const T& operator()(int i, int j) const { return a[4 * i + j]; }
};

template <class T>
struct T3 {  // X_{abc} or X^a_{bc}; first index fastest-varying caller decides
  std::array<T, 64> a{};
  T& operator()(int i, int j, int k) { return a[16 * i + 4 * j + k]; }
  const T& operator()(int i, int j, int k) const { return a[16 * i + 4 * j + k]; }
};

template <class T>
struct T4 {
  std::array<T, 256> a{};
  T& operator()(int i, int j, int k, int l) { return a[64 * i + 16 * j + 4 * k + l]; }
  const T& operator()(int i, int j, int k, int l) const {
    return a[64 * i + 16 * j + 4 * k + l];
  }
};

template <class T>
struct T5 {
  std::array<T, 1024> a{};
  T& operator()(int m, int i, int j, int k, int l) {
    return a[256 * m + 64 * i + 16 * j + 4 * k + l];
  }
  const T& operator()(int m, int i, int j, int k, int l) const {
    return a[256 * m + 64 * i + 16 * j + 4 * k + l];
  }
};

template <class S, class T>
auto add(const S& x, const T& y) {
  S r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
template <class S>
S sub(const S& x, const S& y) {
  S r;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}
template <class S, class T>
S scale(const S& x, const T& s) {
  S r;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] * s;
  return r;
}

// Efficient 4x4 inverse and determinant via 2x2 minors; valid over any
// commutative scalar, no pivoting.
template <class T>
T det4(const M4<T>& m) {
  const T s0 = m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
  const T s1 = m(0, 0) * m(1, 2) - m(1, 0) * m(0, 2);
  const T s2 = m(0, 0) * m(1, 3) - m(1, 0) * m(0, 3);
  const T s3 = m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2);
  const T s4 = m(0, 1) * m(1, 3) - m(1, 1) * m(0, 3);
  const T s5 = m(0, 2) * m(1, 3) - m(1, 2) * m(0, 3);
  const T c5 = m(2, 2) * m(3, 3) - m(3, 2) * m(2, 3);
  const T c4 = m(2, 1) * m(3, 3) - m(3, 1) * m(2, 3);
  const T c3 = m(2, 1) * m(3, 2) - m(3, 1) * m(2, 2);
  const T c2 = m(2, 0) * m(3, 3) - m(3, 0) * m(2, 3);
  const T c1 = m(2, 0) * m(3, 2) - m(3, 0) * m(2, 2);
  const T c0 = m(2, 0) * m(3, 1) - m(3, 0) * m(2, 1);
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

template <class T>
M4<T> inverse4(const M4<T>& m, T* det_out = nullptr) {
  const T s0 = m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
  const T s1 = m(0, 0) * m(1, 2) - m(1, 0) * m(0, 2);
  const T s2 = m(0, 0) * m(1, 3) - m(1, 0) * m(0, 3);
  const T s3 = m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2);
  const T s4 = m(0, 1) * m(1, 3) - m(1, 1) * m(0, 3);
  const T s5 = m(0, 2) * m(1, 3) - m(1, 2) * m(0, 3);
  const T c5 = m(2, 2) * m(3, 3) - m(3, 2) * m(2, 3);
  const T c4 = m(2, 1) * m(3, 3) - m(3, 1) * m(2, 3);
  const T c3 = m(2, 1) * m(3, 2) - m(3, 1) * m(2, 2);
  const T c2 = m(2, 0) * m(3, 3) - m(3, 0) * m(2, 3);
  const T c1 = m(2, 0) * m(3, 2) - m(3, 0) * m(2, 2);
  const T c0 = m(2, 0) * m(3, 1) - m(3, 0) * m(2, 1);
  const T det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
  if (det_out) *det_out = det;
  const T idet = inverse(det);
  M4<T> r;
  r(0, 0) = (m(1, 1) * c5 - m(1, 2) * c4 + m(1, 3) * c3) * idet;
  r(0, 1) = (-m(0, 1) * c5 + m(0, 2) * c4 - m(0, 3) * c3) * idet;
  r(0, 2) = (m(3, 1) * s5 - m(3, 2) * s4 + m(3, 3) * s3) * idet;
  r(0, 3) = (-m(2, 1) * s5 + m(2, 2) * s4 - m(2, 3) * s3) * idet;
  r(1, 0) = (-m(1, 0) * c5 + m(1, 2) * c2 - m(1, 3) * c1) * idet;
  r(1, 1) = (m(0, 0) * c5 - m(0, 2) * c2 + m(0, 3) * c1) * idet;
  r(1, 2) = (-m(3, 0) * s5 + m(3, 2) * s2 - m(3, 3) * s1) * idet;
  r(1, 3) = (m(2, 0) * s5 - m(2, 2) * s2 + m(2, 3) * s1) * idet;
  r(2, 0) = (m(1, 0) * c4 - m(1, 1) * c2 + m(1, 3) * c0) * idet;
  r(2, 1) = (-m(0, 0) * c4 + m(0, 1) * c2 - m(0, 3) * c0) * idet;
  r(2, 2) = (m(3, 0) * s4 - m(3, 1) * s2 + m(3, 3) * s0) * idet;
  r(2, 3) = (-m(2, 0) * s4 + m(2, 1) * s2 - m(2, 3) * s0) * idet;
  r(3, 0) = (-m(1, 0) * c3 + m(1, 1) * c1 - m(1, 2) * c0) * idet;
  r(3, 1) = (m(0, 0) * c3 - m(0, 1) * c1 + m(0, 2) * c0) * idet;
  r(3, 2) = (-m(3, 0) * s3 + m(3, 1) * s1 - m(3, 2) * s0) * idet;
  r(3, 3) = (m(2, 0) * s3 - m(2, 1) * s1 + m(2, 2) * s0) * idet;
  return r;
}

// Lower-triangular Cholesky factor of a symmetric positive definite matrix:
// m = L L^T. Used to build per-site orthonormal (co)frames.
template <class T>
M4<T> cholesky_lower4(const M4<T>& m) {
  M4<T> L;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      T s = m(i, j);
      for (int k = 0; k < j; ++k) s = s - L(i, k) * L(j, k);
      if (i == j) {
        using asdlab::sqrt;
        using std::sqrt;
        L(i, i) = sqrt(s);
      } else {
        L(i, j) = s * inverse(L(j, j));
      }
    }
  }
  return L;
}

}  // namespace asdlab
