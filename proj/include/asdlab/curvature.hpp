#pragma once

// Curvature of a background metric, evaluated pointwise through jet
// arithmetic. Conventions:
//   [nabla_a, nabla_b] v^c = R_ab^c_d v^d
//   R_abcd = g_ce R_ab^e_d,   Ric_bc = g^ae R_abec,   R = g^bc Ric_bc
//   P = (Ric - R/6 g)/2,      J = g^ab P_ab
//   R_abcd = W_abcd + g_ca P_bd - g_cb P_ad + g_db P_ac - g_da P_bc
//   C_abc = nabla_b P_ca - nabla_c P_ba
//   B_ab  = -nabla^c C_abc + P^dc W_dacb

#include <array>

#include "asdlab/background.hpp"
#include "asdlab/jet.hpp"
#include "asdlab/smalltensor.hpp"

namespace asdlab {

// --- covariant derivative helpers on jet-valued tensors --------------------

template <int K>
V4<Jet<K - 1>> grad_scalar(const Jet<K>& f) {
  V4<Jet<K - 1>> r;
  for (int a = 0; a < 4; ++a) r[a] = jet_d(f, a);
  return r;
}

// (nabla omega)_{a b} = d_a omega_b - Gam^c_{ab} omega_c
template <int K>
M4<Jet<K - 1>> covd(const V4<Jet<K>>& om, const T3<Jet<K - 1>>& Gam) {
  M4<Jet<K - 1>> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Jet<K - 1> s = jet_d(om[b], a);
      for (int c = 0; c < 4; ++c) s -= Gam(c, a, b) * jet_truncate<K - 1>(om[c]);
      r(a, b) = s;
    }
  return r;
}

// (nabla T)_{a bc}
template <int K>
T3<Jet<K - 1>> covd(const M4<Jet<K>>& t, const T3<Jet<K - 1>>& Gam) {
  T3<Jet<K - 1>> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        Jet<K - 1> s = jet_d(t(b, c), a);
        for (int e = 0; e < 4; ++e)
          s -= Gam(e, a, b) * jet_truncate<K - 1>(t(e, c)) +
               Gam(e, a, c) * jet_truncate<K - 1>(t(b, e));
        r(a, b, c) = s;
      }
  return r;
}

// (nabla T)_{m abc}
template <int K>
T4<Jet<K - 1>> covd(const T3<Jet<K>>& t, const T3<Jet<K - 1>>& Gam) {
  T4<Jet<K - 1>> r;
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          Jet<K - 1> s = jet_d(t(a, b, c), m);
          for (int e = 0; e < 4; ++e)
            s -= Gam(e, m, a) * jet_truncate<K - 1>(t(e, b, c)) +
                 Gam(e, m, b) * jet_truncate<K - 1>(t(a, e, c)) +
                 Gam(e, m, c) * jet_truncate<K - 1>(t(a, b, e));
          r(m, a, b, c) = s;
        }
  return r;
}

// (nabla T)_{m abcd}
template <int K>
T5<Jet<K - 1>> covd(const T4<Jet<K>>& t, const T3<Jet<K - 1>>& Gam) {
  T5<Jet<K - 1>> r;
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            Jet<K - 1> s = jet_d(t(a, b, c, d), m);
            for (int e = 0; e < 4; ++e)
              s -= Gam(e, m, a) * jet_truncate<K - 1>(t(e, b, c, d)) +
                   Gam(e, m, b) * jet_truncate<K - 1>(t(a, e, c, d)) +
                   Gam(e, m, c) * jet_truncate<K - 1>(t(a, b, e, d)) +
                   Gam(e, m, d) * jet_truncate<K - 1>(t(a, b, c, e));
            r(m, a, b, c, d) = s;
          }
  return r;
}

template <int K>
Jet<K - 2> laplacian_scalar(const Jet<K>& f, const M4<Jet<K - 2>>& ginv,
                            const T3<Jet<K - 2>>& Gam) {
  Jet<K - 2> s;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Jet<K - 2> h = jet_d(jet_d(f, a), b);
      for (int c = 0; c < 4; ++c) h -= Gam(c, a, b) * jet_d(jet_truncate<K - 1>(f), c);
      s += ginv(a, b) * h;
    }
  return s;
}

// --- curvature jets ---------------------------------------------------------

template <int K>
struct CurvJets {
  static_assert(K >= 2);
  M4<Jet<K>> g, ginv;
  Jet<K> det, vol;
  T3<Jet<K - 1>> Gam;  // Gam^a_{bc}
  T4<Jet<K - 2>> Rm;   // lowered
  M4<Jet<K - 2>> Ric, P, P0;
  Jet<K - 2> R, J;
  T4<Jet<K - 2>> W;
};

template <int K>
CurvJets<K> curv_jets(const Background& bg, const Vec4d& x) {
  CurvJets<K> c;
  c.g = bg.template g<Jet<K>>(x);
  c.ginv = inverse4(c.g, &c.det);
  c.vol = sqrt(c.det);

  T3<Jet<K - 1>> dg;  // d_a g_bc
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = b; cc < 4; ++cc) {
        dg(a, b, cc) = jet_d(c.g(b, cc), a);
        dg(a, cc, b) = dg(a, b, cc);
      }
  M4<Jet<K - 1>> gi1;
  for (int i = 0; i < 16; ++i) gi1.a[i] = jet_truncate<K - 1>(c.ginv.a[i]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = b; cc < 4; ++cc) {
        Jet<K - 1> low;
        Jet<K - 1> s;
        for (int d = 0; d < 4; ++d) {
          low = (dg(b, d, cc) + dg(cc, d, b) - dg(d, b, cc)) * 0.5;
          s += gi1(a, d) * low;
        }
        c.Gam(a, b, cc) = s;
        c.Gam(a, cc, b) = s;
      }

  T4<Jet<K - 2>> dGam;  // d_m Gam^a_{bc}
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc) dGam(m, a, b, cc) = jet_d(c.Gam(a, b, cc), m);
  T3<Jet<K - 2>> G2;
  for (int i = 0; i < 64; ++i) G2.a[i] = jet_truncate<K - 2>(c.Gam.a[i]);
  M4<Jet<K - 2>> g2, gi2;
  for (int i = 0; i < 16; ++i) {
    g2.a[i] = jet_truncate<K - 2>(c.g.a[i]);
    gi2.a[i] = jet_truncate<K - 2>(c.ginv.a[i]);
  }

  // R_ab^e_d, then lower third index
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        for (int d = 0; d < 4; ++d) {
          Jet<K - 2> up;
          for (int e = 0; e < 4; ++e) {
            Jet<K - 2> re = dGam(a, e, b, d) - dGam(b, e, a, d);
            for (int f = 0; f < 4; ++f)
              re += G2(e, a, f) * G2(f, b, d) - G2(e, b, f) * G2(f, a, d);
            up += g2(cc, e) * re;
          }
          c.Rm(a, b, cc, d) = up;
        }

  for (int b = 0; b < 4; ++b)
    for (int cc = 0; cc < 4; ++cc) {
      Jet<K - 2> s;
      for (int a = 0; a < 4; ++a)
        for (int e = 0; e < 4; ++e) s += gi2(a, e) * c.Rm(a, b, e, cc);
      c.Ric(b, cc) = s;
    }
  for (int b = 0; b < 4; ++b)
    for (int cc = 0; cc < 4; ++cc) c.R += gi2(b, cc) * c.Ric(b, cc);
  for (int i = 0; i < 16; ++i) c.P.a[i] = (c.Ric.a[i] - g2.a[i] * (c.R / 6.0)) * 0.5;
  for (int b = 0; b < 4; ++b)
    for (int cc = 0; cc < 4; ++cc) c.J += gi2(b, cc) * c.P(b, cc);
  for (int i = 0; i < 16; ++i) c.P0.a[i] = c.P.a[i] - g2.a[i] * (c.J * 0.25);

  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        for (int d = 0; d < 4; ++d)
          c.W(a, b, cc, d) = c.Rm(a, b, cc, d) - g2(cc, a) * c.P(b, d) +
                             g2(cc, b) * c.P(a, d) - g2(d, b) * c.P(a, cc) +
                             g2(d, a) * c.P(b, cc);
  return c;
}

// Curvature data as degree-K jets, for downstream operators that formally
// differentiate composite expressions (tractor and deformation modules).
template <int K>
struct GeomJets {
  M4<Jet<K>> g, ginv, P, P0;
  T3<Jet<K>> Gam;
  Jet<K> J, vol;
  M4<Jet<K>> L;                      // lower Cholesky factor of g
  std::array<M4<Jet<K>>, 3> sdb, asdb;  // orthonormal SD/ASD two-form bases
};

template <int K>
GeomJets<K> geom_jets(const Background& bg, const Vec4d& x) {
  const auto c = curv_jets<K + 2>(bg, x);
  GeomJets<K> r;
  for (int i = 0; i < 16; ++i) {
    r.g.a[i] = jet_truncate<K>(c.g.a[i]);
    r.ginv.a[i] = jet_truncate<K>(c.ginv.a[i]);
    r.P.a[i] = c.P.a[i];
    r.P0.a[i] = c.P0.a[i];
  }
  for (int i = 0; i < 64; ++i) r.Gam.a[i] = jet_truncate<K>(c.Gam.a[i]);
  r.J = c.J;
  r.vol = jet_truncate<K>(c.vol);
  r.L = cholesky_lower4(r.g);
  auto wedge = [&](int al, int be, int a, int b) {
    return r.L(a, al) * r.L(b, be) - r.L(a, be) * r.L(b, al);
  };
  const double inv_sqrt2 = 0.7071067811865475244;
  static const int cyc[3][2] = {{2, 3}, {3, 1}, {1, 2}};
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const auto w0 = wedge(0, i + 1, a, b);
        const auto wc = wedge(cyc[i][0], cyc[i][1], a, b);
        r.sdb[i](a, b) = (w0 + wc) * inv_sqrt2;
        r.asdb[i](a, b) = (w0 - wc) * inv_sqrt2;
      }
  return r;
}

// --- pointwise curvature pack (double precision snapshot) -------------------

struct PackPoint {
  M4<double> g, ginv;
  double det = 0, vol = 0;
  T3<double> Gam;
  T4<double> Rm, W, Wp, Wm;
  M4<double> Ric, P, P0;
  double R = 0, J = 0;
  M4<double> L;
  std::array<M4<double>, 3> sdb, asdb;
  M3<double> WpMat, WmMat;
  // level >= 3
  T3<double> C;
  T3<double> dP;  // (nabla_m P)_{ab}
  V4<double> gradJ;
  // level >= 4
  M4<double> B;
  double lapR = 0, lapJ = 0, Q = 0, Q_alt = 0;
  int level = 2;
};

PackPoint pack_point(const Background& bg, const Vec4d& x, int level = 2);

// Lean Q-curvature point for global invariants.
struct QPoint {
  double R = 0, J = 0, Q = 0, Q_alt = 0, lapJ = 0, lapR = 0, vol = 0;
  double W2 = 0, Wp2 = 0, Wm2 = 0;  // |W|^2, |W+|^2, |W-|^2
};
QPoint q_point(const Background& bg, const Vec4d& x);

// Shared per-site geometry for functional quadratures: the lean Q data plus
// the jets needed by scalar laplacians and the Paneitz operator.
struct FuncGeomPoint {
  QPoint q;
  M4<Jet2> ginv2;
  T3<Jet2> Gam2;
  M4<Jet1> Ric1, ginv1;
  T3<Jet1> Gam1;
  Jet1 R1;
  M4<double> ginv0;
};
FuncGeomPoint func_geom_point(const Background& bg, const Vec4d& x);

// Paneitz operator applied to a degree-4 scalar jet at the same point.
double paneitz_with(const FuncGeomPoint& fg, const Jet<4>& phij);

// Norm and two-form utilities on pack values.
double eps4(int a, int b, int c, int d);
M4<double> raise2(const M4<double>& t, const M4<double>& ginv);
double form_inner(const M4<double>& a, const M4<double>& b, const M4<double>& ginv);
M4<double> hodge_star(const M4<double>& om, const PackPoint& pk);
M4<double> sd_part(const M4<double>& om, const PackPoint& pk);
M4<double> asd_part(const M4<double>& om, const PackPoint& pk);

double tensor_norm2(const T4<double>& t, const M4<double>& ginv);
double tensor_norm2(const T3<double>& t, const M4<double>& ginv);
double sym_norm2(const M4<double>& t, const M4<double>& ginv);
double reassembly_residual(const PackPoint& pk);

// Raise the tensor slot with the given index stride against ginv.
template <class Tn>
Tn raise_slot_t(const Tn& t, const M4<double>& ginv, int stride) {
  Tn r;
  const int n = static_cast<int>(t.a.size());
  for (int base = 0; base < n; ++base) {
    const int pos = (base / stride) % 4;
    double s = 0;
    for (int e = 0; e < 4; ++e) s += ginv(pos, e) * t.a[base + (e - pos) * stride];
    r.a[base] = s;
  }
  return r;
}

template <class Tn>
double tensor_dot(const Tn& a_up, const Tn& b_low) {
  double s = 0;
  for (std::size_t i = 0; i < a_up.a.size(); ++i) s += a_up.a[i] * b_low.a[i];
  return s;
}

}  // namespace asdlab
