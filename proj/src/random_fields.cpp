#include "asdlab/random_fields.hpp"

#include "asdlab/frames.hpp"

namespace asdlab {

namespace {

enum class Kind { torus, s4, s3xs1 };

Kind kind_of(const Background& bg) {
  if (bg.spec.name == "round_s4") return Kind::s4;
  if (bg.spec.name == "s3xs1") return Kind::s3xs1;
  return Kind::torus;
}

struct ScalarModes {
  Kind kind = Kind::torus;
  double extent = 1.0;   // torus edge / circle length
  struct Mode {
    std::array<int, 4> k{};  // torus wave vector
    int i = 0, j = -1;       // ambient factor indices (j < 0: linear)
    double c = 0, phase = 0;
  };
  std::vector<Mode> modes;

  template <class T>
  T operator()(const V4<T>& x) const {
    T s(0.0);
    if (kind == Kind::torus) {
      const double om = 2.0 * M_PI / extent;
      for (const auto& m : modes) {
        T arg(m.phase);
        for (int a = 0; a < 4; ++a)
          if (m.k[a] != 0) arg += x[a] * (om * m.k[a]);
        s += cos(arg) * m.c;
      }
    } else if (kind == Kind::s4) {
      const auto xi = s4_ambient(x);
      for (const auto& m : modes) {
        T t = xi[m.i];
        if (m.j >= 0) t = t * xi[m.j];
        s += t * m.c;
      }
    } else {
      const auto am = s3xs1_ambient(x, extent);
      for (const auto& m : modes) {
        T t = am[m.i];
        if (m.j >= 0) t = t * am[m.j];
        s += t * m.c;
      }
    }
    return s;
  }
};

ScalarModes make_modes(const Background& bg, std::mt19937_64& rng, double amplitude, int nmodes) {
  ScalarModes sm;
  sm.kind = kind_of(bg);
  sm.extent = bg.spec.extent > 0 ? bg.spec.extent : 2.0 * M_PI;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ax(0, 3);
  const int namb = (sm.kind == Kind::s4) ? 5 : 6;
  std::uniform_int_distribution<int> amb(0, namb - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int m = 0; m < nmodes; ++m) {
    ScalarModes::Mode md;
    md.c = amplitude * u(rng) / nmodes * 2.0;
    if (sm.kind == Kind::torus) {
      md.k = {0, 0, 0, 0};
      md.k[ax(rng)] = 1;
      if (coin(rng)) md.k[ax(rng)] += 1;
      md.phase = M_PI * u(rng);
    } else {
      md.i = amb(rng);
      md.j = coin(rng) ? amb(rng) : -1;
    }
    sm.modes.push_back(md);
  }
  return sm;
}

struct TorusCovector {
  std::array<ScalarModes, 4> comp;
  template <class T>
  V4<T> operator()(const V4<T>& x) const {
    V4<T> r;
    for (int a = 0; a < 4; ++a) r[a] = comp[a](x);
    return r;
  }
};

struct S4Covector {
  std::vector<std::pair<ScalarModes, int>> terms;  // coefficient field, d xi index
  template <class T>
  V4<T> operator()(const V4<T>& x) const {
    const auto dxi = s4_ambient_differentials(x);
    V4<T> r;
    for (const auto& [cfn, f] : terms) {
      const T c = cfn(x);
      for (int a = 0; a < 4; ++a) r[a] += c * dxi[f][a];
    }
    return r;
  }
};

struct S3xS1Covector {
  std::vector<std::pair<ScalarModes, int>> terms;  // coefficient field, coframe index
  template <class T>
  V4<T> operator()(const V4<T>& x) const {
    const auto th = s3xs1_coframe(x);
    V4<T> r;
    for (const auto& [cfn, al] : terms) {
      const T c = cfn(x);
      for (int a = 0; a < 4; ++a) r[a] += c * th(a, al);
    }
    return r;
  }
};

struct TorusTwoForm {
  std::array<ScalarModes, 6> comp;
  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    M4<T> r;
    int n = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const T v = comp[n++](x);
        r(a, b) = v;
        r(b, a) = T(0.0) - v;
      }
    return r;
  }
};

struct S4TwoForm {
  std::vector<std::tuple<ScalarModes, int, int>> terms;  // c(x) d xi_i ^ d xi_j
  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    const auto dxi = s4_ambient_differentials(x);
    M4<T> r;
    for (const auto& [cfn, i, j] : terms) {
      const T c = cfn(x);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          r(a, b) += c * (dxi[i][a] * dxi[j][b] - dxi[j][a] * dxi[i][b]);
    }
    return r;
  }
};

struct S3xS1TwoForm {
  std::vector<std::tuple<ScalarModes, int, int>> terms;  // c(x) sigma^al ^ sigma^be
  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    const auto th = s3xs1_coframe(x);
    M4<T> r;
    for (const auto& [cfn, al, be] : terms) {
      const T c = cfn(x);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r(a, b) += c * (th(a, al) * th(b, be) - th(a, be) * th(b, al));
    }
    return r;
  }
};

struct Sym3Field {
  std::array<ScalarModes, 5> comp;
  template <class T>
  M3<T> operator()(const V4<T>& x) const {
    // basis of symmetric trace-free 3x3 matrices
    M3<T> r;
    const T c0 = comp[0](x), c1 = comp[1](x), c2 = comp[2](x), c3 = comp[3](x), c4 = comp[4](x);
    r(0, 0) = c0 + c1;
    r(1, 1) = c1 * (-1.0) + c0;
    r(2, 2) = T(0.0) - c0 * 2.0;
    r(0, 1) = r(1, 0) = c2;
    r(0, 2) = r(2, 0) = c3;
    r(1, 2) = r(2, 1) = c4;
    return r;
  }
};

struct TorusModeFn {
  int axis = 0;
  int k = 1;
  double amp = 1.0, extent = 1.0;
  template <class T>
  T operator()(const V4<T>& x) const {
    return sin(x[axis] * (2.0 * M_PI * k / extent)) * amp;
  }
};

struct ConstFn {
  double c = 0;
  template <class T>
  T operator()(const V4<T>&) const {
    return T(c);
  }
};

struct ShiftFn {
  ScalarFn base;
  double c = 0;
  template <class T>
  T operator()(const V4<T>& xv) const {
    const Vec4d x(value_of(xv[0]), value_of(xv[1]), value_of(xv[2]), value_of(xv[3]));
    return base.template operator()<T>(x) + T(c);
  }
};

}  // namespace

ScalarFn random_scalar(const Background& bg, std::mt19937_64& rng, double amplitude, int nmodes) {
  return ScalarFn::make(make_modes(bg, rng, amplitude, nmodes));
}

CovectorFn random_covector(const Background& bg, std::mt19937_64& rng, double amplitude,
                           int nmodes) {
  const Kind k = kind_of(bg);
  if (k == Kind::torus) {
    TorusCovector f;
    for (int a = 0; a < 4; ++a) f.comp[a] = make_modes(bg, rng, amplitude, nmodes);
    return CovectorFn::make(f);
  }
  if (k == Kind::s4) {
    S4Covector f;
    std::uniform_int_distribution<int> amb(0, 4);
    for (int m = 0; m < 4; ++m)
      f.terms.emplace_back(make_modes(bg, rng, amplitude, std::max(2, nmodes / 2)), amb(rng));
    return CovectorFn::make(f);
  }
  S3xS1Covector f;
  std::uniform_int_distribution<int> fr(0, 3);
  for (int m = 0; m < 4; ++m)
    f.terms.emplace_back(make_modes(bg, rng, amplitude, std::max(2, nmodes / 2)), fr(rng));
  return CovectorFn::make(f);
}

Mat4Fn random_two_form(const Background& bg, std::mt19937_64& rng, double amplitude, int nmodes) {
  const Kind k = kind_of(bg);
  if (k == Kind::torus) {
    TorusTwoForm f;
    for (int i = 0; i < 6; ++i) f.comp[i] = make_modes(bg, rng, amplitude, nmodes);
    return Mat4Fn::make(f);
  }
  if (k == Kind::s4) {
    S4TwoForm f;
    std::uniform_int_distribution<int> amb(0, 4);
    for (int m = 0; m < 6; ++m) {
      int i = amb(rng), j = amb(rng);
      if (i == j) j = (j + 1) % 5;
      f.terms.emplace_back(make_modes(bg, rng, amplitude, std::max(2, nmodes / 2)), i, j);
    }
    return Mat4Fn::make(f);
  }
  S3xS1TwoForm f;
  std::uniform_int_distribution<int> fr(0, 3);
  for (int m = 0; m < 6; ++m) {
    int i = fr(rng), j = fr(rng);
    if (i == j) j = (j + 1) % 4;
    f.terms.emplace_back(make_modes(bg, rng, amplitude, std::max(2, nmodes / 2)), i, j);
  }
  return Mat4Fn::make(f);
}

Sym3Fn random_sym3(const Background& bg, std::mt19937_64& rng, double amplitude, int nmodes) {
  Sym3Field f;
  for (int i = 0; i < 5; ++i) f.comp[i] = make_modes(bg, rng, amplitude, nmodes);
  return Sym3Fn::make(f);
}

ScalarFn torus_mode(int axis, int k, double amplitude, double extent) {
  return ScalarFn::make(TorusModeFn{axis, k, amplitude, extent});
}

ScalarFn constant_scalar(double c) { return ScalarFn::make(ConstFn{c}); }

ScalarFn shifted_scalar(const ScalarFn& f, double c) { return ScalarFn::make(ShiftFn{f, c}); }

}  // namespace asdlab
