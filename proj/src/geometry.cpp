#include "asdlab/geometry.hpp"

#include <cmath>
#include <sstream>

namespace asdlab {

namespace {

struct RescaledMetric {
  Mat4Fn base;
  ScalarFn w;
  // Coordinate jets arriving here are always the standard seeding of a
  // point, so the point can be recovered from the value parts.
  template <class T>
  M4<T> operator()(const V4<T>& xv) const {
    const Vec4d x(value_of(xv[0]), value_of(xv[1]), value_of(xv[2]), value_of(xv[3]));
    auto g = base.template operator()<T>(x);
    const T f = exp(w.template operator()<T>(x) * 2.0);
    M4<T> r;
    for (int i = 0; i < 16; ++i) r.a[i] = g.a[i] * f;
    return r;
  }
};

}  // namespace

namespace geometry {

Background conformal_rescale(const Background& bg, const ScalarFn& w) {
  Background r = bg;
  r.name = bg.name + "+e2w";
  r.metric = Mat4Fn::make(RescaledMetric{bg.metric, w});
  r.lcf = false;  // conformal class unchanged, but do not assume W == 0 bookkeeping
  return r;
}

M4<double> killing_point(const Background& bg, const CovectorFn& omega, const Vec4d& x) {
  const auto c = curv_jets<2>(bg, x);
  T3<Jet0> G0;
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  const auto om = omega.template operator()<Jet1>(x);
  const auto dom = covd(om, G0);  // (nabla_a omega_b)
  double div = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) div += value_of(c.ginv(a, b)) * value_of(dom(a, b));
  M4<double> r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r(i, j) = value_of(dom(i, j)) + value_of(dom(j, i)) - 0.5 * div * value_of(c.g(i, j));
  return r;
}

double commutator_residual_point(const Background& bg, const CovectorFn& omega, const Vec4d& x) {
  const auto c = curv_jets<3>(bg, x);
  T3<Jet1> G1;
  T3<Jet0> G0;
  for (int i = 0; i < 64; ++i) {
    G1.a[i] = jet_truncate<1>(c.Gam.a[i]);
    G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  }
  const auto om = omega.template operator()<Jet2>(x);
  const auto dom = covd(om, G1);
  const auto ddom = covd(dom, G0);  // (a, b, c) = nabla_a nabla_b omega_c
  V4<double> omv;
  for (int a = 0; a < 4; ++a) omv[a] = value_of(om[a]);
  double sup = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc) {
        double rhs = 0;  // R_abc^d omega_d = g^{de} R_abce omega_d
        for (int d = 0; d < 4; ++d)
          for (int e = 0; e < 4; ++e)
            rhs += value_of(c.ginv(d, e)) * value_of(c.Rm(a, b, cc, e)) * omv[d];
        const double lhs = value_of(ddom(a, b, cc)) - value_of(ddom(b, a, cc));
        sup = std::max(sup, std::abs(lhs - rhs));
      }
  return sup;
}

M4<double> hodge_weitzenboeck_residual_point(const Background& bg, const Mat4Fn& omega,
                                             const Vec4d& x) {
  const auto c = curv_jets<3>(bg, x);
  T3<Jet1> G1;
  T3<Jet0> G0;
  M4<Jet1> gi1;
  M4<Jet0> gi0;
  for (int i = 0; i < 64; ++i) {
    G1.a[i] = jet_truncate<1>(c.Gam.a[i]);
    G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  }
  for (int i = 0; i < 16; ++i) {
    gi1.a[i] = jet_truncate<1>(c.ginv.a[i]);
    gi0.a[i] = jet_truncate<0>(c.ginv.a[i]);
  }
  const auto om2 = omega.template operator()<Jet2>(x);

  // d omega as degree-1 jets (exterior derivative needs partials only)
  T3<Jet1> dom;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc)
        dom(a, b, cc) = jet_d(om2(b, cc), a) + jet_d(om2(cc, a), b) + jet_d(om2(a, b), cc);

  // delta omega as degree-1 jets: (delta om)_b = -g^{am} nabla_m om_{ab}
  const auto nab_om1 = covd(om2, G1);  // (m, a, b)
  V4<Jet1> delom;
  for (int b = 0; b < 4; ++b) {
    Jet1 s;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) s -= gi1(m, a) * nab_om1(m, a, b);
    delom[b] = s;
  }

  // delta d omega: (delta X)_{bc} = -nabla^a X_{abc}
  const auto nab_dom = covd(dom, G0);  // (m, a, b, c)
  M4<double> deltad;
  for (int b = 0; b < 4; ++b)
    for (int cc = 0; cc < 4; ++cc) {
      double s = 0;
      for (int m = 0; m < 4; ++m)
        for (int a = 0; a < 4; ++a) s -= value_of(gi0(m, a)) * value_of(nab_dom(m, a, b, cc));
      deltad(b, cc) = s;
    }

  // d delta omega
  M4<double> ddelta;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) ddelta(a, b) = value_of(jet_d(delom[b], a) - jet_d(delom[a], b));

  // rough laplacian
  const auto nab2 = covd(nab_om1, G0);  // (n, m, a, b)
  M4<double> rough;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) s += value_of(gi0(n, m)) * value_of(nab2(n, m, a, b));
      rough(a, b) = s;
    }

  const auto pk = pack_point(bg, x, 2);
  M4<double> omv;
  for (int i = 0; i < 16; ++i) omv.a[i] = value_of(om2.a[i]);
  const auto om_up = raise2(omv, pk.ginv);
  M4<double> wplus_om;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int cc = 0; cc < 4; ++cc)
        for (int d = 0; d < 4; ++d) s += pk.Wp(a, b, cc, d) * om_up(cc, d);
      wplus_om(a, b) = 0.5 * s;
    }

  M4<double> resid;
  for (int i = 0; i < 16; ++i) {
    const double hodge2 = -(deltad.a[i] + ddelta.a[i]);
    resid.a[i] = hodge2 - (rough.a[i] + 2.0 * wplus_om.a[i] - pk.R / 3.0 * omv.a[i]);
  }
  return resid;
}

M4<double> schouten_transform_residual_point(const Background& bg, const Background& rescaled,
                                             const ScalarFn& w, const Vec4d& x) {
  const auto pk_hat = pack_point(rescaled, x, 2);
  const auto c = curv_jets<2>(bg, x);
  T3<Jet0> G0;
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  const auto wj = w.template operator()<Jet2>(x);
  V4<Jet1> dw;
  for (int a = 0; a < 4; ++a) dw[a] = jet_d(wj, a);
  const auto hess = covd(dw, G0);  // nabla_a Upsilon_b
  V4<double> U;
  for (int a = 0; a < 4; ++a) U[a] = value_of(dw[a]);
  double u2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) u2 += value_of(c.ginv(a, b)) * U[a] * U[b];
  M4<double> resid;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double transported = value_of(c.P(a, b)) - value_of(hess(a, b)) + U[a] * U[b] -
                                 0.5 * u2 * value_of(c.g(a, b));
      resid(a, b) = pk_hat.P(a, b) - transported;
    }
  return resid;
}

M4<double> almost_einstein_residual_point(const Background& bg, const ScalarFn& sigma,
                                          const Vec4d& x) {
  const auto c = curv_jets<2>(bg, x);
  T3<Jet0> G0;
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  const auto sj = sigma.template operator()<Jet2>(x);
  V4<Jet1> ds;
  for (int a = 0; a < 4; ++a) ds[a] = jet_d(sj, a);
  const auto hess = covd(ds, G0);
  M4<double> t;
  double tr = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      t(a, b) = 0.5 * (value_of(hess(a, b)) + value_of(hess(b, a))) +
                value_of(c.P(a, b)) * value_of(sj);
      // P is symmetric; symmetrize the hessian for roundoff hygiene
    }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) tr += value_of(c.ginv(a, b)) * t(a, b);
  M4<double> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r(a, b) = t(a, b) - 0.25 * tr * value_of(c.g(a, b));
  return r;
}

double bianchi_residual_point(const Background& bg, const Vec4d& x) {
  const auto c = curv_jets<3>(bg, x);
  const auto pk = pack_point(bg, x, 3);
  T3<Jet0> G0;
  for (int i = 0; i < 64; ++i) G0.a[i] = jet_truncate<0>(c.Gam.a[i]);
  const auto nabW = covd(c.W, G0);  // (m, d, a, b, c)
  double sup = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int cc = 0; cc < 4; ++cc) {
        double divW = 0;  // nabla^d W_{dabc}
        for (int m = 0; m < 4; ++m)
          for (int d = 0; d < 4; ++d)
            divW += pk.ginv(m, d) * value_of(nabW(m, d, a, b, cc));
        sup = std::max(sup, std::abs(pk.C(a, b, cc) - divW));
      }
  return sup;
}

AlgebraicPack decompose_from(const M4<double>& g, const T4<double>& Rm, double sym_tol) {
  double worst = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          worst = std::max(worst, std::abs(Rm(a, b, c, d) + Rm(b, a, c, d)));
          worst = std::max(worst, std::abs(Rm(a, b, c, d) + Rm(a, b, d, c)));
          worst = std::max(worst, std::abs(Rm(a, b, c, d) - Rm(c, d, a, b)));
        }
  if (worst > sym_tol) {
    std::ostringstream os;
    os << "malformed curvature: symmetry violation " << worst << " exceeds " << sym_tol;
    throw PreconditionError(os.str());
  }
  AlgebraicPack p;
  const auto gi = inverse4(g);
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) {
      double s = 0;
      for (int a = 0; a < 4; ++a)
        for (int e = 0; e < 4; ++e) s += gi(a, e) * Rm(a, b, e, c);
      p.Ric(b, c) = s;
    }
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) p.R += gi(b, c) * p.Ric(b, c);
  for (int i = 0; i < 16; ++i) p.P.a[i] = 0.5 * (p.Ric.a[i] - g.a[i] * p.R / 6.0);
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) p.J += gi(b, c) * p.P(b, c);
  for (int i = 0; i < 16; ++i) p.P0.a[i] = p.P.a[i] - 0.25 * p.J * g.a[i];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          p.W(a, b, c, d) = Rm(a, b, c, d) - g(c, a) * p.P(b, d) + g(c, b) * p.P(a, d) -
                            g(d, b) * p.P(a, c) + g(d, a) * p.P(b, c);
  return p;
}

double lattice_scalar_curvature_error(const Background& bg, double r_exact, double window) {
  const ChartLattice& lat = bg.lat;
  LatField<M4<double>> g(lat);
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s)
      g.v[static_cast<std::size_t>(s)] =
          bg.g<double>(lat.coords(lat.unpack(s)));
  });
  const auto Gam = christoffel_lattice(g);
  LatField<M4<double>> ric;
  ScalarLat R;
  ricci_lattice(Gam, g, ric, R);
  double worst = 0;
  for (std::int64_t s = 0; s < lat.nsites(); ++s) {
    const Idx4 i = lat.unpack(s);
    if (!lat.stencil_interior(i, 4)) continue;
    const Vec4d x = lat.coords(i);
    bool inside = true;
    for (int a = 0; a < 4; ++a)
      if (lat.ax[a].kind == AxisKind::analytic_interior && std::abs(x[a]) > window) inside = false;
    if (!inside) continue;
    worst = std::max(worst, std::abs(R.v[static_cast<std::size_t>(s)] - r_exact));
  }
  return worst;
}

void check_finite(const LatField<double>& f, const char* what) {
  for (std::int64_t s = 0; s < f.lat->nsites(); ++s)
    if (!std::isfinite(f.v[static_cast<std::size_t>(s)])) {
      const Idx4 i = f.lat->unpack(s);
      std::ostringstream os;
      os << what << ": non-finite value at site (" << i[0] << "," << i[1] << "," << i[2] << ","
         << i[3] << ")";
      throw NonFiniteFieldError(os.str());
    }
}

}  // namespace geometry

LatField<T3<double>> christoffel_lattice(const LatField<M4<double>>& g) {
  const ChartLattice& lat = *g.lat;
  // validate positive definiteness first
  for (std::int64_t s = 0; s < lat.nsites(); ++s) {
    const auto& m = g.v[static_cast<std::size_t>(s)];
    // leading principal minors
    double d1 = m(0, 0);
    double d2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double d3 = 0, d4 = det4(m);
    {
      const double a = m(0, 0), b = m(0, 1), c = m(0, 2), d = m(1, 1), e = m(1, 2), f = m(2, 2);
      d3 = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
    }
    if (!(d1 > 0 && d2 > 0 && d3 > 0 && d4 > 0) || !std::isfinite(d4)) {
      const Idx4 i = lat.unpack(s);
      std::ostringstream os;
      os << "degenerate metric at site (" << i[0] << "," << i[1] << "," << i[2] << "," << i[3]
         << ")";
      throw DegenerateMetricError(os.str());
    }
  }
  std::array<LatField<M4<double>>, 4> dg;
  for (int a = 0; a < 4; ++a) dg[a] = lat_deriv(g, a);
  LatField<T3<double>> Gam(lat);
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s) {
      const auto& m = g.v[static_cast<std::size_t>(s)];
      const auto gi = inverse4(m);
      auto& G = Gam.v[static_cast<std::size_t>(s)];
      for (int a = 0; a < 4; ++a)
        for (int bb = 0; bb < 4; ++bb)
          for (int cc = bb; cc < 4; ++cc) {
            double sum = 0;
            for (int d = 0; d < 4; ++d) {
              const double low = 0.5 * (dg[bb].v[static_cast<std::size_t>(s)](d, cc) +
                                        dg[cc].v[static_cast<std::size_t>(s)](d, bb) -
                                        dg[d].v[static_cast<std::size_t>(s)](bb, cc));
              sum += gi(a, d) * low;
            }
            G(a, bb, cc) = sum;
            G(a, cc, bb) = sum;
          }
    }
  });
  return Gam;
}

void ricci_lattice(const LatField<T3<double>>& Gam, const LatField<M4<double>>& g,
                   LatField<M4<double>>& ric_out, ScalarLat& r_out) {
  const ChartLattice& lat = *Gam.lat;
  std::array<LatField<T3<double>>, 4> dG;
  for (int m = 0; m < 4; ++m) dG[m] = lat_deriv(Gam, m);
  ric_out = LatField<M4<double>>(lat);
  r_out = ScalarLat(lat);
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s) {
      const auto& G = Gam.v[static_cast<std::size_t>(s)];
      auto& ric = ric_out.v[static_cast<std::size_t>(s)];
      for (int bb = 0; bb < 4; ++bb)
        for (int d = 0; d < 4; ++d) {
          double sum = 0;
          for (int a = 0; a < 4; ++a) {
            sum += dG[a].v[static_cast<std::size_t>(s)](a, bb, d) -
                   dG[bb].v[static_cast<std::size_t>(s)](a, a, d);
            for (int f = 0; f < 4; ++f)
              sum += G(a, a, f) * G(f, bb, d) - G(a, bb, f) * G(f, a, d);
          }
          ric(bb, d) = sum;
        }
      const auto gi = inverse4(g.v[static_cast<std::size_t>(s)]);
      double R = 0;
      for (int bb = 0; bb < 4; ++bb)
        for (int d = 0; d < 4; ++d) R += gi(bb, d) * ric(bb, d);
      r_out.v[static_cast<std::size_t>(s)] = R;
    }
  });
}

}  // namespace asdlab
