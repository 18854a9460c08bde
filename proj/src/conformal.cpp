#include "asdlab/conformal.hpp"

#include <cmath>
#include <sstream>

#include "asdlab/geometry.hpp"

namespace asdlab::conformal {

namespace {

struct LatticeGeom {
  LatField<M4<double>> ginv;
  ScalarLat vol, R;
};

LatticeGeom lattice_geom(const Background& bg, bool with_R) {
  const ChartLattice& lat = bg.lat;
  LatticeGeom lg{LatField<M4<double>>(lat), ScalarLat(lat), ScalarLat(lat)};
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s) {
      const Vec4d x = lat.coords(lat.unpack(s));
      const auto pk = pack_point(bg, x, 2);
      lg.ginv.v[static_cast<std::size_t>(s)] = pk.ginv;
      lg.vol.v[static_cast<std::size_t>(s)] = pk.vol;
      if (with_R) lg.R.v[static_cast<std::size_t>(s)] = pk.R;
    }
  });
  return lg;
}

// divergence-form laplacian: vol^{-1} sum_a D_a(vol g^{ab} D_b f)
ScalarLat laplace_div_form(const LatticeGeom& lg, const ScalarLat& f) {
  const ChartLattice& lat = *f.lat;
  std::array<ScalarLat, 4> df;
  for (int a = 0; a < 4; ++a) df[a] = lat_deriv(f, a);
  ScalarLat out(lat);
  for (int a = 0; a < 4; ++a) {
    ScalarLat flux(lat);
    parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t s = b; s < e; ++s) {
        const auto& gi = lg.ginv.v[static_cast<std::size_t>(s)];
        double v = 0;
        for (int bb = 0; bb < 4; ++bb) v += gi(a, bb) * df[bb].v[static_cast<std::size_t>(s)];
        flux.v[static_cast<std::size_t>(s)] = v * lg.vol.v[static_cast<std::size_t>(s)];
      }
    });
    const auto dflux = lat_deriv(flux, a);
    parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t s = b; s < e; ++s)
        out.v[static_cast<std::size_t>(s)] +=
            dflux.v[static_cast<std::size_t>(s)] / lg.vol.v[static_cast<std::size_t>(s)];
    });
  }
  return out;
}

double dot_vol(const ChartLattice& lat, const LatticeGeom& lg, const ScalarLat& f,
               const ScalarLat& g) {
  return parallel_sum(lat.nsites(), [&](std::int64_t s) {
    const Idx4 i = lat.unpack(s);
    return f.v[static_cast<std::size_t>(s)] * g.v[static_cast<std::size_t>(s)] *
           lg.vol.v[static_cast<std::size_t>(s)] * lat.qweight(i);
  });
}

}  // namespace

double paneitz_point(const Background& bg, const ScalarFn& phi, const Vec4d& x) {
  const auto fg = func_geom_point(bg, x);
  return paneitz_with(fg, phi.template operator()<Jet4>(x));
}

double q_transformation_residual_point(const Background& bg, const Background& rescaled,
                                       const ScalarFn& w, const Vec4d& x) {
  const auto qg = q_point(bg, x);
  const auto qh = q_point(rescaled, x);
  const double wv = w.template operator()<double>(x);
  const double pw = paneitz_point(bg, w, x);
  return qh.Q * std::exp(4.0 * wv) - (qg.Q + pw);
}

FunctionalReport evaluate_functionals(const Background& bg, const ScalarFn& w, const Gammas& ga) {
  const ChartLattice& lat = bg.lat;
  const auto hat = geometry::conformal_rescale(bg, w);
  // overflow-safe normalized exponential: shift by max of 4w
  const double m4w = parallel_max(lat.nsites(), [&](std::int64_t s) {
    return 4.0 * w.template operator()<double>(lat.coords(lat.unpack(s)));
  });
  const double w_sup = parallel_max(lat.nsites(), [&](std::int64_t s) {
    return std::abs(w.template operator()<double>(lat.coords(lat.unpack(s))));
  });
  const bool w_is_zero = w_sup == 0.0;

  constexpr int NI = 13;
  const auto tot = multi_integrate<NI>(lat, [&](const Idx4& idx, std::array<double, NI>& v) {
    const Vec4d x = lat.coords(idx);
    const auto fg = func_geom_point(bg, x);
    const QPoint& q = fg.q;
    const auto wj = w.template operator()<Jet4>(x);

    const double wv = value_of(wj);
    V4<double> dw;
    double gw2 = 0;
    for (int a = 0; a < 4; ++a) dw[a] = value_of(jet_d(jet_truncate<1>(wj), a));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gw2 += fg.ginv0(a, b) * dw[a] * dw[b];
    const double lapw = value_of(jet_truncate<0>(laplacian_scalar(wj, fg.ginv2, fg.Gam2)));
    const double pw = w_is_zero ? 0.0 : paneitz_with(fg, wj);
    const double Rhat = pack_point(hat, x, 2).R;

    const double vol = q.vol;
    v[0] = vol;                                          // V
    v[1] = vol * std::exp(4.0 * wv - m4w);               // shifted e^{4w}
    v[2] = vol * (q.R + 6.0 * gw2) * std::exp(2.0 * wv); // IV numerator
    v[3] = vol * q.Wp2;
    v[4] = vol * q.Wm2;
    v[5] = vol * wv * q.Wp2;
    v[6] = vol * wv * q.Wm2;
    v[7] = vol * q.Q;
    v[8] = vol * q.Q * wv;
    v[9] = vol * wv * pw;
    const double A = lapw + gw2;
    v[10] = vol * A * A;
    v[11] = vol * (wv * q.lapR + q.R * gw2);
    v[12] = vol * Rhat * std::exp(4.0 * wv - m4w);       // shifted R_ghat dv_ghat
  });

  FunctionalReport r;
  r.gammas[0] = ga.g1p;
  r.gammas[1] = ga.g1m;
  r.gammas[2] = ga.g2;
  r.gammas[3] = ga.g3;
  r.gammas[4] = ga.g4;
  r.volume_g = tot[0];
  r.volume_hat = std::exp(m4w) * tot[1];
  r.W_plus_l2 = tot[3];
  r.W_minus_l2 = tot[4];
  r.totalQ = tot[7];
  const double lognorm = m4w + std::log(tot[1]) - std::log(tot[0]);  // log avg e^{4w}
  r.I_plus = 4.0 * tot[5] - tot[3] * lognorm;
  r.I_minus = 4.0 * tot[6] - tot[4] * lognorm;
  r.II = tot[9] + 4.0 * tot[8] - tot[7] * lognorm;
  r.III = 12.0 * tot[10] - 4.0 * tot[11];
  r.IV = tot[2] / std::sqrt(r.volume_hat);
  r.IV_rescaled = std::exp(m4w) * tot[12] / std::sqrt(r.volume_hat);
  r.Phi = ga.g1p * r.I_plus + ga.g1m * r.I_minus + ga.g2 * r.II + ga.g3 * r.III + ga.g4 * r.IV;
  r.kappa = -ga.g1p * tot[3] - ga.g1m * tot[4] - ga.g2 * tot[7];
  return r;
}

TotalInvariants total_invariants(const Background& bg) {
  const ChartLattice& lat = bg.lat;
  constexpr int NI = 5;
  const auto tot = multi_integrate<NI>(lat, [&](const Idx4& idx, std::array<double, NI>& v) {
    const auto q = q_point(bg, lat.coords(idx));
    v[0] = q.vol * q.Q;
    v[1] = q.vol * q.W2;
    v[2] = q.vol * q.Wp2;
    v[3] = q.vol * q.Wm2;
    v[4] = q.vol;
  });
  TotalInvariants r;
  r.totalQ = tot[0];
  r.W_l2 = tot[1];
  r.W_plus_l2 = tot[2];
  r.W_minus_l2 = tot[3];
  r.volume = tot[4];
  const double pi2 = M_PI * M_PI;
  r.chi_est = (r.totalQ + r.W_l2 / 8.0) / (4.0 * pi2);
  r.tau_est = (r.W_plus_l2 - r.W_minus_l2) / (48.0 * pi2);
  // internal cross-check of the two Q forms on a site subsample
  double mism = 0;
  for (const auto& i : subsample_sites(lat, 64, 1234)) {
    const auto q = q_point(bg, lat.coords(i));
    mism = std::max(mism, std::abs(q.Q - q.Q_alt));
  }
  r.q_form_mismatch = mism;
  return r;
}

AdamsReport adams_check(double totalQ) {
  AdamsReport r;
  r.totalQ = totalQ;
  r.margin = 8.0 * M_PI * M_PI - totalQ;
  r.ok = r.margin > 0.0;
  return r;
}

EigenReport conformal_laplacian_lambda1(const Background& bg, int max_iters, double tol) {
  const ChartLattice& lat = bg.lat;
  const auto lg = lattice_geom(bg, true);
  auto apply_L = [&](const ScalarLat& f) {
    ScalarLat out = laplace_div_form(lg, f);
    parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t s = b; s < e; ++s)
        out.v[static_cast<std::size_t>(s)] = -6.0 * out.v[static_cast<std::size_t>(s)] +
                                             lg.R.v[static_cast<std::size_t>(s)] *
                                                 f.v[static_cast<std::size_t>(s)];
    });
    return out;
  };
  const double shift = 1.0;
  auto apply_A = [&](const ScalarLat& f) {  // L + shift
    ScalarLat out = apply_L(f);
    for (std::size_t s = 0; s < out.v.size(); ++s) out.v[s] += shift * f.v[s];
    return out;
  };
  auto cg_solve = [&](const ScalarLat& rhs) {
    ScalarLat x(lat), r = rhs, p = rhs;
    double rr = dot_vol(lat, lg, r, r);
    const double rhs_norm = std::sqrt(std::max(rr, 1e-300));
    for (int it = 0; it < 4000; ++it) {
      if (std::sqrt(rr) < 1e-12 * rhs_norm) break;
      const ScalarLat Ap = apply_A(p);
      const double alpha = rr / dot_vol(lat, lg, p, Ap);
      double rr_new = 0;
      for (std::size_t s = 0; s < x.v.size(); ++s) {
        x.v[s] += alpha * p.v[s];
        r.v[s] -= alpha * Ap.v[s];
      }
      rr_new = dot_vol(lat, lg, r, r);
      const double beta = rr_new / rr;
      for (std::size_t s = 0; s < p.v.size(); ++s) p.v[s] = r.v[s] + beta * p.v[s];
      rr = rr_new;
    }
    return x;
  };

  ScalarLat x(lat);
  for (std::size_t s = 0; s < x.v.size(); ++s) x.v[s] = 1.0 + 1e-3 * std::sin(0.37 * s);
  EigenReport rep;
  double lam_prev = 1e300;
  for (int it = 1; it <= max_iters; ++it) {
    ScalarLat y = cg_solve(x);
    const double n = std::sqrt(dot_vol(lat, lg, y, y));
    for (auto& v : y.v) v /= n;
    const ScalarLat Ly = apply_L(y);
    const double lam = dot_vol(lat, lg, y, Ly);
    double rnorm = 0;
    {
      ScalarLat res = Ly;
      for (std::size_t s = 0; s < res.v.size(); ++s) res.v[s] -= lam * y.v[s];
      rnorm = std::sqrt(dot_vol(lat, lg, res, res));
    }
    x = y;
    rep.lambda1 = lam;
    rep.residual = rnorm;
    rep.iterations = it;
    if (rnorm < tol && std::abs(lam - lam_prev) < tol * std::max(1.0, std::abs(lam))) break;
    lam_prev = lam;
    if (it == max_iters) {
      std::ostringstream os;
      os << "conformal laplacian eigensolver did not converge after " << max_iters
         << " iterations; residual " << rnorm;
      throw IterationLimitError(os.str());
    }
  }
  // sign-normalize to a positive ground state
  double mean = 0;
  for (double v : x.v) mean += v;
  if (mean < 0)
    for (auto& v : x.v) v = -v;
  rep.positive = true;
  for (double v : x.v)
    if (!(v > 0)) rep.positive = false;
  rep.eigenfield = x;
  return rep;
}

Certificate certify(long long chi, long long tau, double yamabe) {
  if (!(yamabe > 0))
    throw HypothesisError("certificate requires Yamabe invariant > 0, got " +
                          std::to_string(yamabe));
  Certificate c;
  c.lhs = 2.0 * chi + 3.0 * tau;
  c.rhs = -yamabe * yamabe / (24.0 * M_PI * M_PI);
  c.unobstructed = c.lhs >= c.rhs;
  c.q_lhs = 2.0 * M_PI * M_PI * c.lhs;  // total Q via Eq. (Qt)
  c.q_rhs = -yamabe * yamabe / 12.0;
  return c;
}

void ConformalFactorField::set(const Background& bg, const ScalarLat& win) {
  const ChartLattice& lat = *win.lat;
  w = win;
  e2w = ScalarLat(lat);
  e4w = ScalarLat(lat);
  gradw2 = ScalarLat(lat);
  for (int a = 0; a < 4; ++a) dw[a] = lat_deriv(w, a);
  const auto lg = lattice_geom(bg, false);
  lapw = laplace_div_form(lg, w);
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s) {
      const double wv = w.v[static_cast<std::size_t>(s)];
      e2w.v[static_cast<std::size_t>(s)] = std::exp(2.0 * wv);
      e4w.v[static_cast<std::size_t>(s)] = std::exp(4.0 * wv);
      const auto& gi = lg.ginv.v[static_cast<std::size_t>(s)];
      double g2 = 0;
      for (int a = 0; a < 4; ++a)
        for (int bb = 0; bb < 4; ++bb)
          g2 += gi(a, bb) * dw[a].v[static_cast<std::size_t>(s)] *
                dw[bb].v[static_cast<std::size_t>(s)];
      gradw2.v[static_cast<std::size_t>(s)] = g2;
    }
  });
}

double ConformalFactorField::cache_residual(const Background& bg) const {
  ConformalFactorField fresh;
  fresh.set(bg, w);
  double m = 0;
  for (std::size_t s = 0; s < w.v.size(); ++s) {
    m = std::max(m, std::abs(fresh.e2w.v[s] - e2w.v[s]));
    m = std::max(m, std::abs(fresh.e4w.v[s] - e4w.v[s]));
    m = std::max(m, std::abs(fresh.lapw.v[s] - lapw.v[s]));
    m = std::max(m, std::abs(fresh.gradw2.v[s] - gradw2.v[s]));
  }
  return m;
}

}  // namespace asdlab::conformal
