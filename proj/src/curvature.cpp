#include "asdlab/curvature.hpp"

#include <cmath>

namespace asdlab {

namespace {

template <class T>
void build_sd_bases(const M4<T>& L, std::array<M4<T>, 3>& sdb, std::array<M4<T>, 3>& asdb) {
  auto wedge = [&](int al, int be, int a, int b) {
    return L(a, al) * L(b, be) - L(a, be) * L(b, al);
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

template <int K>
void fill_values(PackPoint& pk, const CurvJets<K>& c) {
  for (int i = 0; i < 16; ++i) {
    pk.g.a[i] = value_of(c.g.a[i]);
    pk.ginv.a[i] = value_of(c.ginv.a[i]);
    pk.Ric.a[i] = value_of(c.Ric.a[i]);
    pk.P.a[i] = value_of(c.P.a[i]);
    pk.P0.a[i] = value_of(c.P0.a[i]);
  }
  pk.det = value_of(c.det);
  pk.vol = value_of(c.vol);
  for (int i = 0; i < 64; ++i) pk.Gam.a[i] = value_of(c.Gam.a[i]);
  for (int i = 0; i < 256; ++i) {
    pk.Rm.a[i] = value_of(c.Rm.a[i]);
    pk.W.a[i] = value_of(c.W.a[i]);
  }
  pk.R = value_of(c.R);
  pk.J = value_of(c.J);

  pk.L = cholesky_lower4(pk.g);
  build_sd_bases(pk.L, pk.sdb, pk.asdb);

  std::array<M4<double>, 3> up_sd, up_asd;
  for (int i = 0; i < 3; ++i) {
    up_sd[i] = raise2(pk.sdb[i], pk.ginv);
    up_asd[i] = raise2(pk.asdb[i], pk.ginv);
  }
  auto block = [&](const std::array<M4<double>, 3>& ui, const std::array<M4<double>, 3>& uj,
                   M3<double>& out) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc)
              for (int d = 0; d < 4; ++d)
                s += ui[i](a, b) * pk.W(a, b, cc, d) * uj[j](cc, d);
        out(i, j) = 0.25 * s;
      }
  };
  block(up_sd, up_sd, pk.WpMat);
  block(up_asd, up_asd, pk.WmMat);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        for (int d = 0; d < 4; ++d) {
          double sp = 0, sm = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              sp += pk.WpMat(i, j) * pk.sdb[i](a, b) * pk.sdb[j](cc, d);
              sm += pk.WmMat(i, j) * pk.asdb[i](a, b) * pk.asdb[j](cc, d);
            }
          pk.Wp(a, b, cc, d) = sp;
          pk.Wm(a, b, cc, d) = sm;
        }
}

}  // namespace

PackPoint pack_point(const Background& bg, const Vec4d& x, int level) {
  PackPoint pk;
  pk.level = level;
  if (level <= 2) {
    fill_values(pk, curv_jets<2>(bg, x));
    return pk;
  }
  if (level == 3) {
    const auto c = curv_jets<3>(bg, x);
    fill_values(pk, c);
    T3<double> G0;
    for (int i = 0; i < 64; ++i) G0.a[i] = value_of(c.Gam.a[i]);
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double s = value_of(jet_d(c.P(a, b), m));
          for (int e = 0; e < 4; ++e)
            s -= G0(e, m, a) * pk.P(e, b) + G0(e, m, b) * pk.P(a, e);
          pk.dP(m, a, b) = s;
        }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc) pk.C(a, b, cc) = pk.dP(b, cc, a) - pk.dP(cc, b, a);
    for (int m = 0; m < 4; ++m) pk.gradJ[m] = value_of(jet_d(c.J, m));
    return pk;
  }

  const auto c = curv_jets<4>(bg, x);
  fill_values(pk, c);
  T3<Jet1> G1;
  for (int i = 0; i < 64; ++i) G1.a[i] = jet_truncate<1>(c.Gam.a[i]);
  const auto dP1 = covd(c.P, G1);  // (nabla_m P)_{ab} as Jet1
  T3<Jet1> C1;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc) C1(a, b, cc) = dP1(b, cc, a) - dP1(cc, b, a);
  for (int i = 0; i < 64; ++i) {
    pk.dP.a[i] = value_of(dP1.a[i]);
    pk.C.a[i] = value_of(C1.a[i]);
  }
  T3<Jet0> G0j;
  for (int i = 0; i < 64; ++i) G0j.a[i] = jet_truncate<0>(c.Gam.a[i]);
  const auto dC = covd(C1, G0j);  // (nabla_m C)_{abc}
  M4<double> Pup;                 // P^{dc}
  {
    M4<double> P0d;
    for (int i = 0; i < 16; ++i) P0d.a[i] = value_of(c.P.a[i]);
    Pup = raise2(P0d, pk.ginv);
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int m = 0; m < 4; ++m)
        for (int cc = 0; cc < 4; ++cc) s -= pk.ginv(m, cc) * value_of(dC(m, a, b, cc));
      for (int d = 0; d < 4; ++d)
        for (int cc = 0; cc < 4; ++cc) s += Pup(d, cc) * pk.W(d, a, cc, b);
      pk.B(a, b) = s;
    }

  M4<Jet0> gi0;
  for (int i = 0; i < 16; ++i) gi0.a[i] = jet_truncate<0>(c.ginv.a[i]);
  pk.lapR = value_of(laplacian_scalar(c.R, gi0, G0j));
  pk.lapJ = value_of(laplacian_scalar(c.J, gi0, G0j));
  for (int m = 0; m < 4; ++m) pk.gradJ[m] = value_of(jet_d(jet_truncate<1>(c.J), m));
  const double P2 = sym_norm2(pk.P, pk.ginv);
  const double Ric2 = sym_norm2(pk.Ric, pk.ginv);
  pk.Q = -0.5 * pk.lapJ + pk.J * pk.J - P2;
  pk.Q_alt = (-pk.lapR + pk.R * pk.R - 3.0 * Ric2) / 12.0;
  return pk;
}

FuncGeomPoint func_geom_point(const Background& bg, const Vec4d& x) {
  FuncGeomPoint fg;
  QPoint& q = fg.q;
  const auto g4 = bg.g<Jet4>(x);
  Jet4 det;
  const auto gi4 = inverse4(g4, &det);
  q.vol = std::sqrt(value_of(det));

  // Gamma as degree-3 jets
  T3<Jet3> dg;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = b; cc < 4; ++cc) {
        dg(a, b, cc) = jet_d(g4(b, cc), a);
        dg(a, cc, b) = dg(a, b, cc);
      }
  M4<Jet3> gi3;
  for (int i = 0; i < 16; ++i) gi3.a[i] = jet_truncate<3>(gi4.a[i]);
  T3<Jet3> Gam;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = b; cc < 4; ++cc) {
        Jet3 s;
        for (int d = 0; d < 4; ++d)
          s += gi3(a, d) * ((dg(b, d, cc) + dg(cc, d, b) - dg(d, b, cc)) * 0.5);
        Gam(a, b, cc) = s;
        Gam(a, cc, b) = s;
      }

  // Ricci as degree-2 jets without assembling the full Riemann tensor
  T3<Jet2>& G2 = fg.Gam2;
  for (int i = 0; i < 64; ++i) G2.a[i] = jet_truncate<2>(Gam.a[i]);
  M4<Jet2> Ric;
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) {
      Jet2 s;
      for (int a = 0; a < 4; ++a) {
        s += jet_d(Gam(a, b, d), a) - jet_d(Gam(a, a, d), b);
        for (int f = 0; f < 4; ++f)
          s += G2(a, a, f) * G2(f, b, d) - G2(a, b, f) * G2(f, a, d);
      }
      Ric(b, d) = s;
    }
  M4<Jet2> g2;
  M4<Jet2>& gi2 = fg.ginv2;
  for (int i = 0; i < 16; ++i) {
    g2.a[i] = jet_truncate<2>(g4.a[i]);
    gi2.a[i] = jet_truncate<2>(gi4.a[i]);
  }
  Jet2 R2;
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) R2 += gi2(b, d) * Ric(b, d);
  M4<Jet2> P;
  for (int i = 0; i < 16; ++i) P.a[i] = (Ric.a[i] - g2.a[i] * (R2 / 6.0)) * 0.5;
  Jet2 J2;
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) J2 += gi2(b, d) * P(b, d);

  M4<Jet0> gi0;
  T3<Jet0> G0;
  for (int i = 0; i < 16; ++i) gi0.a[i] = jet_truncate<0>(gi2.a[i]);
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(G2.a[i]);
  for (int i = 0; i < 16; ++i) {
    fg.Ric1.a[i] = jet_truncate<1>(Ric.a[i]);
    fg.ginv1.a[i] = jet_truncate<1>(gi2.a[i]);
    fg.ginv0.a[i] = value_of(gi2.a[i]);
  }
  for (int i = 0; i < 64; ++i) fg.Gam1.a[i] = jet_truncate<1>(G2.a[i]);
  fg.R1 = jet_truncate<1>(R2);
  q.R = value_of(R2);
  q.J = value_of(J2);
  q.lapR = value_of(laplacian_scalar(R2, gi0, G0));
  q.lapJ = value_of(laplacian_scalar(J2, gi0, G0));

  M4<double> Pd, Ricd;
  for (int i = 0; i < 16; ++i) {
    Pd.a[i] = value_of(P.a[i]);
    Ricd.a[i] = value_of(Ric.a[i]);
  }
  const double P2n = sym_norm2(Pd, fg.ginv0);
  const double Ric2n = sym_norm2(Ricd, fg.ginv0);
  q.Q = -0.5 * q.lapJ + q.J * q.J - P2n;
  q.Q_alt = (-q.lapR + q.R * q.R - 3.0 * Ric2n) / 12.0;

  // Weyl tensor and SD/ASD norms at value level
  {
    M4<double> gd, Ld;
    for (int i = 0; i < 16; ++i) gd.a[i] = value_of(g2.a[i]);
    T3<double> G0d;
    for (int i = 0; i < 64; ++i) G0d.a[i] = value_of(G2.a[i]);
    T4<double> dG;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int cc = 0; cc < 4; ++cc) dG(m, a, b, cc) = value_of(jet_d(fg.Gam1(a, b, cc), m));
    T4<double> Rm;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc)
          for (int d = 0; d < 4; ++d) {
            double up = 0;
            for (int e = 0; e < 4; ++e) {
              double re = dG(a, e, b, d) - dG(b, e, a, d);
              for (int f = 0; f < 4; ++f)
                re += G0d(e, a, f) * G0d(f, b, d) - G0d(e, b, f) * G0d(f, a, d);
              up += gd(cc, e) * re;
            }
            Rm(a, b, cc, d) = up;
          }
    T4<double> W;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int cc = 0; cc < 4; ++cc)
          for (int d = 0; d < 4; ++d)
            W(a, b, cc, d) = Rm(a, b, cc, d) - gd(cc, a) * Pd(b, d) + gd(cc, b) * Pd(a, d) -
                             gd(d, b) * Pd(a, cc) + gd(d, a) * Pd(b, cc);
    q.W2 = tensor_norm2(W, fg.ginv0);
    Ld = cholesky_lower4(gd);
    std::array<M4<double>, 3> sdb, asdb, up_sd, up_asd;
    build_sd_bases(Ld, sdb, asdb);
    for (int i = 0; i < 3; ++i) {
      up_sd[i] = raise2(sdb[i], fg.ginv0);
      up_asd[i] = raise2(asdb[i], fg.ginv0);
    }
    double wp = 0, wm = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sp = 0, sm = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int cc = 0; cc < 4; ++cc)
              for (int d = 0; d < 4; ++d) {
                sp += up_sd[i](a, b) * W(a, b, cc, d) * up_sd[j](cc, d);
                sm += up_asd[i](a, b) * W(a, b, cc, d) * up_asd[j](cc, d);
              }
        sp *= 0.25;
        sm *= 0.25;
        wp += sp * sp;
        wm += sm * sm;
      }
    q.Wp2 = 4.0 * wp;
    q.Wm2 = 4.0 * wm;
  }
  return fg;
}

QPoint q_point(const Background& bg, const Vec4d& x) { return func_geom_point(bg, x).q; }

double paneitz_with(const FuncGeomPoint& fg, const Jet<4>& phij) {
  const Jet2 lap = laplacian_scalar(phij, fg.ginv2, fg.Gam2);
  M4<Jet0> gi0;
  T3<Jet0> G0;
  for (int i = 0; i < 16; ++i) gi0.a[i] = jet_truncate<0>(fg.ginv2.a[i]);
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(fg.Gam2.a[i]);
  const double lap2 = value_of(laplacian_scalar(lap, gi0, G0));
  V4<Jet1> dphi;
  for (int a = 0; a < 4; ++a) dphi[a] = jet_d(jet_truncate<2>(phij), a);
  double divX = 0;
  V4<Jet1> X;
  for (int a = 0; a < 4; ++a) {
    Jet1 v;
    for (int b = 0; b < 4; ++b) {
      Jet1 ric_up;
      for (int cc = 0; cc < 4; ++cc)
        for (int d = 0; d < 4; ++d) ric_up += fg.ginv1(a, cc) * fg.ginv1(b, d) * fg.Ric1(cc, d);
      v += (fg.ginv1(a, b) * fg.R1 * (2.0 / 3.0) - ric_up * 2.0) * dphi[b];
    }
    X[a] = v;
  }
  for (int a = 0; a < 4; ++a) {
    Jet0 t = jet_d(X[a], a);
    for (int e = 0; e < 4; ++e) t += jet_truncate<0>(fg.Gam1(a, a, e)) * jet_truncate<0>(X[e]);
    divX += value_of(t);
  }
  return lap2 + divX;
}

double eps4(int a, int b, int c, int d) {
  const int p[4] = {a, b, c, d};
  double sign = 1.0;
  int q[4] = {p[0], p[1], p[2], p[3]};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (q[i] == q[j]) return 0.0;
      if (q[i] > q[j]) {
        std::swap(q[i], q[j]);
        sign = -sign;
      }
    }
  return sign;
}

M4<double> raise2(const M4<double>& t, const M4<double>& ginv) {
  M4<double> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) s += ginv(a, c) * ginv(b, d) * t(c, d);
      r(a, b) = s;
    }
  return r;
}

double form_inner(const M4<double>& a, const M4<double>& b, const M4<double>& ginv) {
  const auto bu = raise2(b, ginv);
  double s = 0;
  for (int i = 0; i < 16; ++i) s += a.a[i] * bu.a[i];
  return 0.5 * s;
}

M4<double> hodge_star(const M4<double>& om, const PackPoint& pk) {
  const auto up = raise2(om, pk.ginv);
  M4<double> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double e = eps4(a, b, c, d);
          if (e != 0.0) s += e * up(c, d);
        }
      r(a, b) = 0.5 * pk.vol * s;
    }
  return r;
}

M4<double> sd_part(const M4<double>& om, const PackPoint& pk) {
  M4<double> r;
  for (int i = 0; i < 3; ++i) {
    const double c = form_inner(om, pk.sdb[i], pk.ginv);
    for (int k = 0; k < 16; ++k) r.a[k] += c * pk.sdb[i].a[k];
  }
  return r;
}

M4<double> asd_part(const M4<double>& om, const PackPoint& pk) {
  M4<double> r;
  for (int i = 0; i < 3; ++i) {
    const double c = form_inner(om, pk.asdb[i], pk.ginv);
    for (int k = 0; k < 16; ++k) r.a[k] += c * pk.asdb[i].a[k];
  }
  return r;
}

double tensor_norm2(const T4<double>& t, const M4<double>& ginv) {
  T4<double> u = raise_slot_t(t, ginv, 64);
  u = raise_slot_t(u, ginv, 16);
  u = raise_slot_t(u, ginv, 4);
  u = raise_slot_t(u, ginv, 1);
  double n = 0;
  for (int i = 0; i < 256; ++i) n += u.a[i] * t.a[i];
  return n;
}

double tensor_norm2(const T3<double>& t, const M4<double>& ginv) {
  T3<double> u = raise_slot_t(t, ginv, 16);
  u = raise_slot_t(u, ginv, 4);
  u = raise_slot_t(u, ginv, 1);
  double n = 0;
  for (int i = 0; i < 64; ++i) n += u.a[i] * t.a[i];
  return n;
}

double sym_norm2(const M4<double>& t, const M4<double>& ginv) {
  const auto up = raise2(t, ginv);
  double n = 0;
  for (int i = 0; i < 16; ++i) n += up.a[i] * t.a[i];
  return n;
}

double reassembly_residual(const PackPoint& pk) {
  double m = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double rebuilt = pk.Wp(a, b, c, d) + pk.Wm(a, b, c, d) +
                                 pk.g(c, a) * pk.P(b, d) - pk.g(c, b) * pk.P(a, d) +
                                 pk.g(d, b) * pk.P(a, c) - pk.g(d, a) * pk.P(b, c);
          m = std::max(m, std::abs(pk.Rm(a, b, c, d) - rebuilt));
        }
  return m;
}

}  // namespace asdlab
