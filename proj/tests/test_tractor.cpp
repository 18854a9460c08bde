#include <cmath>
#include <random>

#include "asdlab/background.hpp"
#include "asdlab/random_fields.hpp"
#include "asdlab/tractor.hpp"
#include "doctest.h"

using namespace asdlab;
using namespace asdlab::tractor;

namespace {
Background bg_of(const std::string& name, int sites = 8, unsigned long long seed = 3) {
  GeometrySpec s;
  s.name = name;
  s.sites = sites;
  s.seed = seed;
  s.extent = (name == "flat_t4" || name == "perturbed_flat") ? 1.0 : 2.0 * M_PI;
  return make_background(s);
}

TractorValue basis_X() {
  TractorValue v;
  v.rho = 1.0;
  return v;
}
TractorValue basis_Y() {
  TractorValue v;
  v.sigma = 1.0;
  return v;
}
TractorValue basis_Z(int b, const M4<double>& g) {
  TractorValue v;
  for (int a = 0; a < 4; ++a) v.mu[a] = g(b, a);
  return v;
}

TractorField random_tractor(const Background& bg, std::mt19937_64& rng) {
  TractorField f;
  f.sigma = random_scalar(bg, rng, 1.0);
  f.mu = random_covector(bg, rng, 1.0);
  f.rho = random_scalar(bg, rng, 1.0);
  return f;
}

// h(V,W) as a jet, fixed-scale contraction
template <int K>
Jet<K> pair_jets(const TractorJet<K>& V, const TractorJet<K>& W, const M4<Jet<K>>& ginv) {
  Jet<K> s = V.sigma * W.rho + W.sigma * V.rho;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) s += ginv(a, b) * V.mu[a] * W.mu[b];
  return s;
}
}  // namespace

TEST_CASE("figure-1 pairing table is exact") {
  M4<double> g;
  for (int i = 0; i < 4; ++i) g(i, i) = 1.0;
  g(0, 1) = g(1, 0) = 0.25;  // pairing table holds in any metric
  const auto gi = inverse4(g);
  CHECK(pair_point(basis_Y(), basis_X(), gi) == 1.0);
  CHECK(pair_point(basis_X(), basis_Y(), gi) == 1.0);
  CHECK(pair_point(basis_Y(), basis_Y(), gi) == 0.0);
  CHECK(pair_point(basis_X(), basis_X(), gi) == 0.0);
  for (int b = 0; b < 4; ++b) {
    CHECK(pair_point(basis_Z(b, g), basis_X(), gi) == 0.0);
    CHECK(pair_point(basis_Z(b, g), basis_Y(), gi) == 0.0);
  }
  // Z_b . Z^c = delta: pair(Z_b, Z_c) = g_bc
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c)
      CHECK(pair_point(basis_Z(b, g), basis_Z(c, g), gi) == doctest::Approx(g(b, c)).epsilon(1e-15));
}

TEST_CASE("thomas_D examples") {
  const auto flat = bg_of("flat_t4");
  const Vec4d x(0.3, 0.1, 0.6, 0.8);
  auto t1 = thomas_D_point(flat, Density{constant_scalar(1.0), 1}, x);
  CHECK(value_of(t1.sigma) == 1.0);
  for (int a = 0; a < 4; ++a) CHECK(std::abs(value_of(t1.mu[a])) < 1e-14);
  CHECK(std::abs(value_of(t1.rho)) < 1e-13);

  auto t2 = thomas_D_point(flat, Density{torus_mode(0, 1, 1.0, 1.0), 1}, x);
  const double s = std::sin(2.0 * M_PI * 0.3);
  CHECK(value_of(t2.rho) == doctest::Approx(M_PI * M_PI * s).epsilon(1e-11));

  const auto s4 = bg_of("round_s4");
  auto t3 = thomas_D_point(s4, Density{constant_scalar(1.0), 1}, Vec4d(0.2, 0.5, -0.7, 1.0));
  CHECK(value_of(t3.sigma) == 1.0);
  CHECK(value_of(t3.rho) == doctest::Approx(-0.5).epsilon(1e-11));

  CHECK_THROWS_AS(thomas_D_point(flat, Density{constant_scalar(1.0), 0}, x), PreconditionError);
}

TEST_CASE("tractor connection flat examples and S4 parallel Einstein scale") {
  const auto flat = bg_of("flat_t4");
  const Vec4d x(0.2, 0.7, 0.4, 0.9);
  const auto gj0 = geom_jets<0>(flat, x);
  // V = (1, 0, 0) constant is parallel on the flat torus
  TractorJet<1> Y;
  Y.sigma = Jet1(1.0);
  auto dY = tractor_connection_jets<1>(Y, gj0);
  for (int a = 0; a < 4; ++a) {
    CHECK(std::abs(value_of(dY[a].sigma)) < 1e-14);
    CHECK(std::abs(value_of(dY[a].rho)) < 1e-14);
    for (int b = 0; b < 4; ++b) CHECK(std::abs(value_of(dY[a].mu[b])) < 1e-14);
  }
  // V = (0, dx1, 0): slot 1 = -delta_a1
  TractorJet<1> Vm;
  Vm.mu[1] = Jet1(1.0);
  auto dV = tractor_connection_jets<1>(Vm, gj0);
  for (int a = 0; a < 4; ++a) {
    CHECK(value_of(dV[a].sigma) == doctest::Approx(a == 1 ? -1.0 : 0.0));
    for (int b = 0; b < 4; ++b) CHECK(std::abs(value_of(dV[a].mu[b])) < 1e-14);
    CHECK(std::abs(value_of(dV[a].rho)) < 1e-14);
  }

  const auto s4 = bg_of("round_s4");
  for (const Vec4d& xs : {Vec4d(0.3, -0.6, 0.1, 0.9), Vec4d(1.4, 0.2, 0.7, -0.4)}) {
    const auto t = thomas_D_jets<1>(s4, constant_scalar(1.0), xs);
    const auto gj = geom_jets<0>(s4, xs);
    const auto dt = tractor_connection_jets<1>(t, gj);
    for (int a = 0; a < 4; ++a) {
      CHECK(std::abs(value_of(dt[a].sigma)) < 1e-10);
      CHECK(std::abs(value_of(dt[a].rho)) < 1e-10);
      for (int b = 0; b < 4; ++b) CHECK(std::abs(value_of(dt[a].mu[b])) < 1e-10);
    }
  }
}

TEST_CASE("projector derivative table residual") {
  for (const char* name : {"flat_t4", "round_s4", "perturbed_flat"}) {
    const auto bg = bg_of(name);
    const Vec4d x = (bg.name == "round_s4") ? Vec4d(0.4, -0.2, 0.7, 0.1) : Vec4d(0.3, 0.6, 0.1, 0.8);
    CHECK(tractor::projector_derivative_residual(pack_point(bg, x, 2)) < 1e-13);
  }
}

TEST_CASE("conformal transform: round trip, pairing invariance, first column") {
  const auto bg = bg_of("perturbed_flat");
  std::mt19937_64 rng(17);
  const auto V = random_tractor(bg, rng);
  const auto W = random_tractor(bg, rng);
  const auto wfun = random_scalar(bg, rng, 0.3);
  const Vec4d x(0.4, 0.2, 0.8, 0.6);
  const auto pk = pack_point(bg, x, 2);

  const auto wj = wfun.operator()<Jet1>(x);
  V4<double> up;
  for (int a = 0; a < 4; ++a) up[a] = value_of(jet_d(wj, a));

  const auto v0 = V.eval<0>(x);
  const auto w0 = W.eval<0>(x);
  const auto vh = conformal_transform(v0, up, pk.ginv);
  const auto wh = conformal_transform(w0, up, pk.ginv);
  CHECK(pair_point(vh, wh, pk.ginv) == doctest::Approx(pair_point(v0, w0, pk.ginv)).epsilon(1e-14));

  V4<double> noup;
  for (int a = 0; a < 4; ++a) noup[a] = -up[a];
  const auto back = conformal_transform(vh, noup, pk.ginv);
  CHECK(value_of(back.sigma) == doctest::Approx(value_of(v0.sigma)).epsilon(1e-13));
  CHECK(value_of(back.rho) == doctest::Approx(value_of(v0.rho)).epsilon(1e-13));
  for (int a = 0; a < 4; ++a)
    CHECK(value_of(back.mu[a]) == doctest::Approx(value_of(v0.mu[a])).epsilon(1e-13));

  // (1,0,0) -> (1, Upsilon, -|Upsilon|^2/2)
  const auto yh = conformal_transform(basis_Y(), up, pk.ginv);
  double up2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) up2 += pk.ginv(a, b) * up[a] * up[b];
  CHECK(value_of(yh.sigma) == 1.0);
  for (int a = 0; a < 4; ++a) CHECK(value_of(yh.mu[a]) == doctest::Approx(up[a]));
  CHECK(value_of(yh.rho) == doctest::Approx(-0.5 * up2));
}

TEST_CASE("metric compatibility of the tractor connection") {
  const auto bg = bg_of("perturbed_flat");
  std::mt19937_64 rng(23);
  const auto V = random_tractor(bg, rng);
  const auto W = random_tractor(bg, rng);
  const Vec4d x(0.7, 0.1, 0.3, 0.5);
  const auto gj1 = geom_jets<1>(bg, x);
  const auto gj0 = geom_jets<0>(bg, x);
  const auto vj = V.eval<2>(x);
  const auto wj = W.eval<2>(x);
  TractorJet<1> v1, w1;
  v1.sigma = jet_truncate<1>(vj.sigma);
  v1.rho = jet_truncate<1>(vj.rho);
  w1.sigma = jet_truncate<1>(wj.sigma);
  w1.rho = jet_truncate<1>(wj.rho);
  for (int a = 0; a < 4; ++a) {
    v1.mu[a] = jet_truncate<1>(vj.mu[a]);
    w1.mu[a] = jet_truncate<1>(wj.mu[a]);
  }
  const auto h = pair_jets<1>(v1, w1, gj1.ginv);
  const auto dv = tractor_connection_jets<2>(vj, gj1);
  const auto dw = tractor_connection_jets<2>(wj, gj1);
  for (int a = 0; a < 4; ++a) {
    TractorJet<0> dva, dwa, v0, w0;
    dva.sigma = jet_truncate<0>(dv[a].sigma);
    dva.rho = jet_truncate<0>(dv[a].rho);
    dwa.sigma = jet_truncate<0>(dw[a].sigma);
    dwa.rho = jet_truncate<0>(dw[a].rho);
    v0.sigma = jet_truncate<0>(v1.sigma);
    v0.rho = jet_truncate<0>(v1.rho);
    w0.sigma = jet_truncate<0>(w1.sigma);
    w0.rho = jet_truncate<0>(w1.rho);
    for (int b = 0; b < 4; ++b) {
      dva.mu[b] = jet_truncate<0>(dv[a].mu[b]);
      dwa.mu[b] = jet_truncate<0>(dw[a].mu[b]);
      v0.mu[b] = jet_truncate<0>(v1.mu[b]);
      w0.mu[b] = jet_truncate<0>(w1.mu[b]);
    }
    const double lhs = value_of(jet_d(h, a));
    const double rhs = value_of(pair_jets<0>(dva, w0, gj0.ginv)) +
                       value_of(pair_jets<0>(v0, dwa, gj0.ginv));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("tractor curvature equals connection commutator") {
  std::mt19937_64 rng(31);
  for (const char* name : {"perturbed_flat", "s3xs1", "flat_t4"}) {
    const auto bg = bg_of(name);
    const auto V = random_tractor(bg, rng);
    const Vec4d x = (bg.name == "s3xs1") ? Vec4d(0.7, 1.3, 2.1, 0.5) : Vec4d(0.15, 0.45, 0.85, 0.35);
    const auto pk = pack_point(bg, x, 3);
    const auto kap = tractor_curvature_point(pk);
    const auto gj1 = geom_jets<1>(bg, x);
    const auto gj0 = geom_jets<0>(bg, x);
    const auto vj = V.eval<2>(x);
    const auto dv = tractor_connection_jets<2>(vj, gj1);
    std::array<std::array<TractorJet<0>, 4>, 4> ddv;
    for (int b = 0; b < 4; ++b) {
      const auto in = dv[b];
      const auto d2 = tractor_connection_jets<1>(in, gj0);
      for (int a = 0; a < 4; ++a) ddv[a][b] = d2[a];
    }
    const auto v0 = V.eval<0>(x);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const auto act = adj_action(kap, a, b, v0, pk.g, pk.ginv);
        // symmetric-Gamma terms cancel in the antisymmetrization
        CHECK(std::abs((value_of(ddv[a][b].sigma) - value_of(ddv[b][a].sigma)) -
                       value_of(act.sigma)) < 1e-9);
        CHECK(std::abs((value_of(ddv[a][b].rho) - value_of(ddv[b][a].rho)) - value_of(act.rho)) <
              1e-9);
        for (int c = 0; c < 4; ++c)
          CHECK(std::abs((value_of(ddv[a][b].mu[c]) - value_of(ddv[b][a].mu[c])) -
                         value_of(act.mu[c])) < 1e-9);
      }
  }
}

TEST_CASE("adjoint two-form block round trip and h decomposition") {
  const auto bg = bg_of("perturbed_flat");
  const Vec4d x(0.52, 0.13, 0.78, 0.31);
  const auto pk = pack_point(bg, x, 2);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1);
  AdjBlocks<double> blk;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      blk.a(i, j) = u(rng);
      blk.a(j, i) = -blk.a(i, j);
      for (int k = 0; k < 4; ++k) {
        blk.b(i, j, k) = u(rng);
        blk.b(j, i, k) = -blk.b(i, j, k);
        blk.c(i, j, k) = u(rng);
        blk.c(j, i, k) = -blk.c(i, j, k);
        for (int l = k + 1; l < 4; ++l) {
          blk.d(i, j, k, l) = u(rng);
          blk.d(i, j, l, k) = -blk.d(i, j, k, l);
          blk.d(j, i, k, l) = -blk.d(i, j, k, l);
          blk.d(j, i, l, k) = blk.d(i, j, k, l);
        }
      }
    }
  const auto z = adj66_from_blocks(blk, pk.g);
  const auto back = blocks_from_adj66(z, pk.ginv);
  for (int i = 0; i < 16; ++i) CHECK(back.a.a[i] == doctest::Approx(blk.a.a[i]).epsilon(1e-12));
  for (int i = 0; i < 64; ++i) {
    CHECK(back.b.a[i] == doctest::Approx(blk.b.a[i]).epsilon(1e-12));
    CHECK(back.c.a[i] == doctest::Approx(blk.c.a[i]).epsilon(1e-12));
  }
  for (int i = 0; i < 256; ++i) CHECK(back.d.a[i] == doctest::Approx(blk.d.a[i]).epsilon(1e-12));

  // h = Z Z g + X Y + Y X reproduces the pairing on the six basis pairs
  // via the component matrix H
  double H[6][6] = {};
  H[0][5] = H[5][0] = 1.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) H[1 + a][1 + b] = pk.g(a, b);
  auto comp = [&](const TractorValue& v, int A) {
    if (A == 0) return value_of(v.sigma);
    if (A == 5) return value_of(v.rho);
    return value_of(v.mu[A - 1]);
  };
  std::vector<TractorValue> basis = {basis_Y(), basis_Z(0, pk.g), basis_Z(1, pk.g),
                                     basis_Z(2, pk.g), basis_Z(3, pk.g), basis_X()};
  (void)H;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      const double direct = pair_point(basis[p], basis[q], pk.ginv);
      // contracting components with h^{AB} must reproduce the pairing
      double viaH = 0;
      double cp[6], cq[6];
      for (int A = 0; A < 6; ++A) {
        cp[A] = comp(basis[p], A);
        cq[A] = comp(basis[q], A);
      }
      // contraction with h^{AB}: h^{-1} has the same block shape with ginv
      double Hi[6][6] = {};
      Hi[0][5] = Hi[5][0] = 1.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) Hi[1 + a][1 + b] = pk.ginv(a, b);
      for (int A = 0; A < 6; ++A)
        for (int B = 0; B < 6; ++B) viaH += Hi[A][B] * cp[A] * cq[B];
      CHECK(viaH == doctest::Approx(direct).epsilon(1e-13));
    }
}
