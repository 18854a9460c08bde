#include <cmath>

#include "asdlab/background.hpp"
#include "asdlab/curvature.hpp"
#include "doctest.h"

using namespace asdlab;

namespace {
GeometrySpec small_spec(const std::string& name, int sites = 8) {
  GeometrySpec s;
  s.name = name;
  s.sites = sites;
  if (name == "s3xs1" || name == "round_s4") s.extent = 2.0 * M_PI;
  if (name == "flat_t4" || name == "perturbed_flat") s.extent = 1.0;
  return s;
}
}  // namespace

TEST_CASE("flat torus curvature vanishes") {
  const auto bg = make_background(small_spec("flat_t4"));
  const auto pk = pack_point(bg, Vec4d(0.3, 0.1, 0.7, 0.2), 4);
  for (double v : pk.Gam.a) CHECK(std::abs(v) < 1e-14);
  for (double v : pk.Rm.a) CHECK(std::abs(v) < 1e-14);
  CHECK(std::abs(pk.R) < 1e-13);
  CHECK(std::abs(pk.Q) < 1e-13);
}

TEST_CASE("round S4 closed-form curvature") {
  const auto bg = make_background(small_spec("round_s4"));
  for (const Vec4d& x : {Vec4d(0.2, -0.4, 0.1, 0.6), Vec4d(1.1, 0.0, -0.9, 0.3)}) {
    const auto pk = pack_point(bg, x, 4);
    CHECK(pk.R == doctest::Approx(12.0).epsilon(1e-11));
    CHECK(pk.J == doctest::Approx(2.0).epsilon(1e-11));
    // constant curvature: R_abcd = g_ac g_bd - g_ad g_bc
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            const double exact = pk.g(a, c) * pk.g(b, d) - pk.g(a, d) * pk.g(b, c);
            CHECK(pk.Rm(a, b, c, d) == doctest::Approx(exact).epsilon(1e-10));
            CHECK(std::abs(pk.W(a, b, c, d)) < 1e-10);
          }
    // P = g/2
    for (int i = 0; i < 16; ++i) CHECK(pk.P.a[i] == doctest::Approx(0.5 * pk.g.a[i]).epsilon(1e-10));
    CHECK(pk.Q == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pk.Q_alt == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(std::abs(pk.lapR) < 1e-8);
    for (double v : pk.C.a) CHECK(std::abs(v) < 1e-10);
    CHECK(reassembly_residual(pk) < 1e-10);
  }
}

TEST_CASE("S3xS1 product curvature") {
  const auto bg = make_background(small_spec("s3xs1"));
  const Vec4d x(0.6, 1.0, 2.0, 0.5);
  const auto pk = pack_point(bg, x, 4);
  CHECK(pk.R == doctest::Approx(6.0).epsilon(1e-11));
  CHECK(pk.J == doctest::Approx(1.0).epsilon(1e-11));
  // P has adapted-frame eigenvalues (1/2,1/2,1/2,-1/2): check via P g^-1
  M4<double> Pmix;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0;
      for (int c = 0; c < 4; ++c) s += pk.ginv(a, c) * pk.P(c, b);
      Pmix(a, b) = s;
    }
  CHECK(Pmix(0, 0) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(Pmix(1, 1) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(Pmix(2, 2) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(Pmix(3, 3) == doctest::Approx(-0.5).epsilon(1e-11));
  for (double v : pk.W.a) CHECK(std::abs(v) < 1e-10);
  for (double v : pk.C.a) CHECK(std::abs(v) < 1e-10);  // locally symmetric
  CHECK(std::abs(pk.Q) < 1e-10);
  // |P0|^2 = 3/4
  CHECK(sym_norm2(pk.P0, pk.ginv) == doctest::Approx(0.75).epsilon(1e-10));
  // Gamma theta-independent: compare two theta values
  const auto pk2 = pack_point(bg, Vec4d(0.6, 1.0, 2.0, 2.5), 2);
  for (int i = 0; i < 64; ++i) CHECK(pk.Gam.a[i] == doctest::Approx(pk2.Gam.a[i]).epsilon(1e-12));
}

TEST_CASE("hodge star and SD bases") {
  const auto bg = make_background(small_spec("perturbed_flat"));
  const auto pk = pack_point(bg, Vec4d(0.21, 0.55, 0.13, 0.78), 2);
  // bases are orthonormal and (anti-)self-dual
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double ip = form_inner(pk.sdb[i], pk.sdb[j], pk.ginv);
      const double im = form_inner(pk.asdb[i], pk.asdb[j], pk.ginv);
      const double ix = form_inner(pk.sdb[i], pk.asdb[j], pk.ginv);
      CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      CHECK(im == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      CHECK(std::abs(ix) < 1e-12);
    }
    const auto sp = hodge_star(pk.sdb[i], pk);
    const auto sm = hodge_star(pk.asdb[i], pk);
    for (int k = 0; k < 16; ++k) {
      CHECK(sp.a[k] == doctest::Approx(pk.sdb[i].a[k]).epsilon(5e-12));
      CHECK(sm.a[k] == doctest::Approx(-pk.asdb[i].a[k]).epsilon(5e-12));
    }
  }
  // star is an involution; projectors split and are orthogonal
  M4<double> om;
  om(0, 1) = 0.7;
  om(1, 0) = -0.7;
  om(1, 3) = -0.2;
  om(3, 1) = 0.2;
  om(2, 3) = 0.4;
  om(3, 2) = -0.4;
  const auto ss = hodge_star(hodge_star(om, pk), pk);
  for (int k = 0; k < 16; ++k) CHECK(ss.a[k] == doctest::Approx(om.a[k]).epsilon(1e-12));
  const auto p = sd_part(om, pk), m = asd_part(om, pk);
  for (int k = 0; k < 16; ++k) CHECK(p.a[k] + m.a[k] == doctest::Approx(om.a[k]).epsilon(1e-12));
  CHECK(std::abs(form_inner(p, m, pk.ginv)) < 1e-12);
  const auto pp = sd_part(p, pk);
  for (int k = 0; k < 16; ++k) CHECK(pp.a[k] == doctest::Approx(p.a[k]).epsilon(1e-12));
}

TEST_CASE("perturbed flat Weyl blocks and Bianchi") {
  const auto bg = make_background(small_spec("perturbed_flat"));
  const Vec4d x(0.37, 0.11, 0.83, 0.52);
  const auto pk = pack_point(bg, x, 4);
  // Weyl is totally trace free
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) {
      double tr = 0;
      for (int a = 0; a < 4; ++a)
        for (int e = 0; e < 4; ++e) tr += pk.ginv(a, e) * pk.W(a, b, e, c);
      CHECK(std::abs(tr) < 1e-12);
    }
  // SD/ASD reconstruction reproduces W (mixed blocks vanish)
  double wdiff = 0;
  for (int i = 0; i < 256; ++i)
    wdiff = std::max(wdiff, std::abs(pk.W.a[i] - pk.Wp.a[i] - pk.Wm.a[i]));
  CHECK(wdiff < 1e-12);
  CHECK(reassembly_residual(pk) < 1e-12);
  // contracted Bianchi: nabla^m P_mk = nabla_k J
  for (int k = 0; k < 4; ++k) {
    double divP = 0;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) divP += pk.ginv(m, a) * pk.dP(m, a, k);
    CHECK(divP == doctest::Approx(pk.gradJ[k]).epsilon(1e-10));
  }
}
