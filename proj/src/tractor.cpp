#include "asdlab/tractor.hpp"

namespace asdlab::tractor {

template <int K>
TractorJet<K> thomas_D_jets(const Background& bg, const ScalarFn& sigma, const Vec4d& x) {
  const auto gj = geom_jets<K>(bg, x);
  const auto s = sigma.template operator()<Jet<K + 2>>(x);
  TractorJet<K> r;
  r.sigma = jet_truncate<K>(s);
  for (int a = 0; a < 4; ++a) r.mu[a] = jet_truncate<K>(jet_d(jet_truncate<K + 1>(s), a));
  const auto lap = laplacian_scalar(s, gj.ginv, gj.Gam);
  r.rho = (lap + gj.J * r.sigma) * (-0.25);
  return r;
}
template TractorJet<0> thomas_D_jets<0>(const Background&, const ScalarFn&, const Vec4d&);
template TractorJet<1> thomas_D_jets<1>(const Background&, const ScalarFn&, const Vec4d&);
template TractorJet<2> thomas_D_jets<2>(const Background&, const ScalarFn&, const Vec4d&);

TractorValue thomas_D_point(const Background& bg, const Density& sigma, const Vec4d& x) {
  if (sigma.weight != 1)
    throw PreconditionError("thomas_D expects a weight-1 density, got weight " +
                            std::to_string(sigma.weight));
  return thomas_D_jets<0>(bg, sigma.f, x);
}

double pair_point(const TractorValue& V, const TractorValue& W, const M4<double>& ginv) {
  double s = value_of(V.sigma) * value_of(W.rho) + value_of(W.sigma) * value_of(V.rho);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) s += ginv(a, b) * value_of(V.mu[a]) * value_of(W.mu[b]);
  return s;
}

template <int K>
std::array<TractorJet<K - 1>, 4> tractor_connection_jets(const TractorJet<K>& V,
                                                         const GeomJets<K - 1>& gj) {
  std::array<TractorJet<K - 1>, 4> out;
  Jet<K - 1> sig = jet_truncate<K - 1>(V.sigma);
  Jet<K - 1> rho = jet_truncate<K - 1>(V.rho);
  V4<Jet<K - 1>> mu;
  for (int a = 0; a < 4; ++a) mu[a] = jet_truncate<K - 1>(V.mu[a]);
  for (int a = 0; a < 4; ++a) {
    out[a].sigma = jet_d(V.sigma, a) - mu[a];
    for (int b = 0; b < 4; ++b) {
      Jet<K - 1> m = jet_d(V.mu[b], a) + gj.P(a, b) * sig + gj.g(a, b) * rho;
      for (int c = 0; c < 4; ++c) m -= gj.Gam(c, a, b) * mu[c];
      out[a].mu[b] = m;
    }
    Jet<K - 1> r = jet_d(V.rho, a);
    for (int c = 0; c < 4; ++c)
      for (int e = 0; e < 4; ++e) r -= gj.P(a, e) * gj.ginv(e, c) * mu[c];
    out[a].rho = r;
  }
  return out;
}
template std::array<TractorJet<0>, 4> tractor_connection_jets<1>(const TractorJet<1>&,
                                                                 const GeomJets<0>&);
template std::array<TractorJet<1>, 4> tractor_connection_jets<2>(const TractorJet<2>&,
                                                                 const GeomJets<1>&);

TractorValue conformal_transform(const TractorValue& V, const V4<double>& upsilon,
                                 const M4<double>& ginv) {
  TractorValue r;
  r.sigma = V.sigma;
  for (int a = 0; a < 4; ++a) r.mu[a] = value_of(V.mu[a]) + value_of(V.sigma) * upsilon[a];
  double updotmu = 0, up2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      updotmu += ginv(a, b) * upsilon[a] * value_of(V.mu[b]);
      up2 += ginv(a, b) * upsilon[a] * upsilon[b];
    }
  r.rho = value_of(V.rho) - updotmu - 0.5 * up2 * value_of(V.sigma);
  return r;
}

Mat6 splitting_transport(const V4<double>& upsilon, const M4<double>& ginv) {
  Mat6 M{};
  V4<double> up;
  double up2 = 0;
  for (int a = 0; a < 4; ++a) {
    double s = 0;
    for (int b = 0; b < 4; ++b) s += ginv(a, b) * upsilon[b];
    up[a] = s;
  }
  for (int a = 0; a < 4; ++a) up2 += up[a] * upsilon[a];
  M[0][0] = 1.0;
  for (int b = 0; b < 4; ++b) {
    M[1 + b][0] = upsilon[b];
    M[1 + b][1 + b] = 1.0;
  }
  M[5][0] = -0.5 * up2;
  for (int c = 0; c < 4; ++c) M[5][1 + c] = -up[c];
  M[5][5] = 1.0;
  return M;
}

Mat6 splitting_transport_weighted(const V4<double>& upsilon, const M4<double>& ginv,
                                  double w_value) {
  Mat6 M = splitting_transport(upsilon, ginv);
  const double ew = std::exp(w_value);
  for (int col = 0; col < 6; ++col) {
    M[0][col] *= ew;
    for (int b = 0; b < 4; ++b) M[1 + b][col] *= ew;
    M[5][col] /= ew;
  }
  return M;
}

AdjBlocksValue tractor_curvature_point(const PackPoint& pk) {
  AdjBlocksValue k;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      for (int kk = 0; kk < 4; ++kk) {
        double b = 0;
        for (int c = 0; c < 4; ++c) b -= pk.ginv(kk, c) * pk.C(c, i, j);
        k.b(i, j, kk) = b;
        for (int l = 0; l < 4; ++l) {
          double d = 0;
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
              d += 0.5 * pk.ginv(kk, p) * pk.ginv(l, q) * pk.W(i, j, p, q);
          k.d(i, j, kk, l) = d;
        }
      }
    }
  return k;
}

TractorValue adj_action(const AdjBlocksValue& k, int i, int j, const TractorValue& V,
                        const M4<double>& g, const M4<double>& ginv) {
  (void)ginv;
  TractorValue r;
  r.sigma = 0.0;
  for (int c = 0; c < 4; ++c) {
    double m = 0;
    for (int kk = 0; kk < 4; ++kk) {
      for (int d = 0; d < 4; ++d) m += 2.0 * g(c, kk) * k.d(i, j, kk, d) * value_of(V.mu[d]);
      m -= g(c, kk) * k.b(i, j, kk) * value_of(V.sigma);
    }
    r.mu[c] = m;
  }
  double rho = 0;
  for (int c = 0; c < 4; ++c) rho += k.b(i, j, c) * value_of(V.mu[c]);
  r.rho = rho;
  return r;
}

template <class T>
Adj66<T> adj66_from_blocks(const AdjBlocks<T>& blk, const M4<T>& g) {
  Adj66<T> z;
  for (auto& v : z) v = T(0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      z[adj66_index(i, j, 5, 0)] += blk.a(i, j);
      z[adj66_index(i, j, 0, 5)] -= blk.a(i, j);
      for (int m = 0; m < 4; ++m) {
        T lb(0.0), lc(0.0);
        for (int kk = 0; kk < 4; ++kk) {
          lb += g(m, kk) * blk.b(i, j, kk);
          lc += g(m, kk) * blk.c(i, j, kk);
        }
        z[adj66_index(i, j, 5, 1 + m)] += lb;
        z[adj66_index(i, j, 1 + m, 5)] -= lb;
        z[adj66_index(i, j, 0, 1 + m)] += lc;
        z[adj66_index(i, j, 1 + m, 0)] -= lc;
      }
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          T s(0.0);
          for (int kk = 0; kk < 4; ++kk)
            for (int l = 0; l < 4; ++l) s += g(p, kk) * g(q, l) * blk.d(i, j, kk, l);
          z[adj66_index(i, j, 1 + p, 1 + q)] += s * 2.0;
        }
    }
  return z;
}
template Adj66<double> adj66_from_blocks(const AdjBlocks<double>&, const M4<double>&);
template Adj66<Jet0> adj66_from_blocks(const AdjBlocks<Jet0>&, const M4<Jet0>&);
template Adj66<Jet1> adj66_from_blocks(const AdjBlocks<Jet1>&, const M4<Jet1>&);
template Adj66<Jet2> adj66_from_blocks(const AdjBlocks<Jet2>&, const M4<Jet2>&);

template <class T>
AdjBlocks<T> blocks_from_adj66(const Adj66<T>& z, const M4<T>& ginv) {
  AdjBlocks<T> blk;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      blk.a(i, j) = z[adj66_index(i, j, 5, 0)];
      for (int kk = 0; kk < 4; ++kk) {
        T b(0.0), c(0.0);
        for (int m = 0; m < 4; ++m) {
          b += ginv(kk, m) * z[adj66_index(i, j, 5, 1 + m)];
          c += ginv(kk, m) * z[adj66_index(i, j, 0, 1 + m)];
        }
        blk.b(i, j, kk) = b;
        blk.c(i, j, kk) = c;
        for (int l = 0; l < 4; ++l) {
          T d(0.0);
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
              d += ginv(kk, p) * ginv(l, q) * z[adj66_index(i, j, 1 + p, 1 + q)];
          blk.d(i, j, kk, l) = d * 0.5;
        }
      }
    }
  return blk;
}
template AdjBlocks<double> blocks_from_adj66(const Adj66<double>&, const M4<double>&);
template AdjBlocks<Jet0> blocks_from_adj66(const Adj66<Jet0>&, const M4<Jet0>&);
template AdjBlocks<Jet1> blocks_from_adj66(const Adj66<Jet1>&, const M4<Jet1>&);
template AdjBlocks<Jet2> blocks_from_adj66(const Adj66<Jet2>&, const M4<Jet2>&);

template <int K>
std::vector<Jet<K - 1>> coupled_covd(const std::vector<Jet<K>>& comp, int ncoord,
                                     const GeomJets<K - 1>& gj) {
  const int ntot = ncoord + 2;  // coordinate slots including (i, j)
  const std::size_t n_in = comp.size();
  std::vector<Jet<K - 1>> out(4 * n_in);

  // strides: [c_0 ... c_{ntot-1}, A, B], B fastest
  std::vector<std::size_t> cstride(ntot);
  std::size_t s = 36;
  for (int k = ntot - 1; k >= 0; --k) {
    cstride[k] = s;
    s *= 4;
  }

  // P with one raised index
  M4<Jet<K - 1>> Pmix;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      Jet<K - 1> v;
      for (int e = 0; e < 4; ++e) v += gj.P(a, e) * gj.ginv(e, c);
      Pmix(a, c) = v;
    }

  auto trunc = [&](std::size_t idx) { return jet_truncate<K - 1>(comp[idx]); };

  for (int m = 0; m < 4; ++m) {
    for (std::size_t I = 0; I < n_in; ++I) {
      Jet<K - 1> val = jet_d(comp[I], m);
      const int A = static_cast<int>((I / 6) % 6);
      const int B = static_cast<int>(I % 6);
      // Levi-Civita corrections on coordinate slots
      for (int k = 0; k < ntot; ++k) {
        const int ck = static_cast<int>((I / cstride[k]) % 4);
        const std::size_t base = I - static_cast<std::size_t>(ck) * cstride[k];
        for (int p = 0; p < 4; ++p)
          val -= gj.Gam(p, m, ck) * trunc(base + static_cast<std::size_t>(p) * cstride[k]);
      }
      // tractor correction on A
      {
        const std::size_t base = I - static_cast<std::size_t>(A) * 6;
        if (A == 0) {
          val -= trunc(base + static_cast<std::size_t>(1 + m) * 6);
        } else if (A == 5) {
          for (int c = 0; c < 4; ++c)
            val -= Pmix(m, c) * trunc(base + static_cast<std::size_t>(1 + c) * 6);
        } else {
          const int b = A - 1;
          val += gj.P(m, b) * trunc(base) + gj.g(m, b) * trunc(base + 5 * 6);
          for (int c = 0; c < 4; ++c)
            val -= gj.Gam(c, m, b) * trunc(base + static_cast<std::size_t>(1 + c) * 6);
        }
      }
      // tractor correction on B
      {
        const std::size_t base = I - static_cast<std::size_t>(B);
        if (B == 0) {
          val -= trunc(base + static_cast<std::size_t>(1 + m));
        } else if (B == 5) {
          for (int c = 0; c < 4; ++c)
            val -= Pmix(m, c) * trunc(base + static_cast<std::size_t>(1 + c));
        } else {
          const int b = B - 1;
          val += gj.P(m, b) * trunc(base) + gj.g(m, b) * trunc(base + 5);
          for (int c = 0; c < 4; ++c)
            val -= gj.Gam(c, m, b) * trunc(base + static_cast<std::size_t>(1 + c));
        }
      }
      out[static_cast<std::size_t>(m) * n_in + I] = val;
    }
  }
  return out;
}
template std::vector<Jet<0>> coupled_covd<1>(const std::vector<Jet<1>>&, int, const GeomJets<0>&);
template std::vector<Jet<1>> coupled_covd<2>(const std::vector<Jet<2>>&, int, const GeomJets<1>&);

double projector_derivative_residual(const PackPoint& pk) {
  double worst = 0;
  // nabla_k X = Z_k
  for (int k = 0; k < 4; ++k) {
    // X = (0, 0, 1): connection gives (0 - 0, 0 + g_kb, 0 - 0)
    for (int b = 0; b < 4; ++b) worst = std::max(worst, std::abs(pk.g(k, b) - pk.g(k, b)));
    // nabla_k Z_l = -P_kl X - Y g_kl: connection on (0, g_lb, 0)
    for (int l = 0; l < 4; ++l) {
      const double sig = 0.0 - pk.g(l, k);        // sigma slot: -mu_k
      worst = std::max(worst, std::abs(sig - (-pk.g(k, l))));
      double rho = 0;                              // -P_k^c g_lc
      for (int c = 0; c < 4; ++c)
        for (int e = 0; e < 4; ++e) rho -= pk.P(k, e) * pk.ginv(e, c) * pk.g(l, c);
      worst = std::max(worst, std::abs(rho - (-pk.P(k, l))));
    }
    // nabla_k Y = P_kl Z^l: connection on (1, 0, 0) gives mu-slot P_kb
    for (int b = 0; b < 4; ++b) {
      double rhs = 0;  // P_k^l (Z_l)_b = P_k^l g_lb
      for (int l = 0; l < 4; ++l)
        for (int e = 0; e < 4; ++e) rhs += pk.P(k, e) * pk.ginv(e, l) * pk.g(l, b);
      worst = std::max(worst, std::abs(pk.P(k, b) - rhs));
    }
  }
  return worst;
}

}  // namespace asdlab::tractor
