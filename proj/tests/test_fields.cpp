#include <cmath>

#include "asdlab/background.hpp"
#include "asdlab/curvature.hpp"
#include "asdlab/frames.hpp"
#include "asdlab/geometry.hpp"
#include "asdlab/random_fields.hpp"
#include "doctest.h"

using namespace asdlab;

namespace {

Background bg_of(const std::string& name, int sites = 8, unsigned long long seed = 3) {
  GeometrySpec s;
  s.name = name;
  s.sites = sites;
  s.seed = seed;
  s.extent = (name == "flat_t4" || name == "perturbed_flat") ? 1.0 : 2.0 * M_PI;
  return make_background(s);
}

struct ConstCov {
  template <class T>
  V4<T> operator()(const V4<T>&) const {
    V4<T> r;
    r[0] = T(0.3);
    r[1] = T(-1.2);
    r[2] = T(0.5);
    r[3] = T(0.9);
    return r;
  }
};

struct ModeCov {
  template <class T>
  V4<T> operator()(const V4<T>& x) const {
    V4<T> r;
    r[1] = sin(x[0] * (2.0 * M_PI));
    return r;
  }
};

struct RotCov {
  template <class T>
  V4<T> operator()(const V4<T>& s) const {
    V4<T> x, ch;
    T r2(0.0);
    for (int a = 0; a < 4; ++a) {
      x[a] = sinh(s[a]);
      ch[a] = cosh(s[a]);
      r2 += x[a] * x[a];
    }
    const T phi = 2.0 / (1.0 + r2);
    const T phi2 = phi * phi;
    V4<T> vx;  // rotation in the (0,1) plane of the stereographic chart
    vx[0] = T(0.0) - x[1];
    vx[1] = x[0];
    V4<T> om;
    for (int a = 0; a < 4; ++a) om[a] = phi2 * ch[a] * vx[a];
    return om;
  }
};

struct ConstSD {
  template <class T>
  M4<T> operator()(const V4<T>&) const {
    M4<T> r;
    r(0, 1) = T(1.0);
    r(1, 0) = T(-1.0);
    r(2, 3) = T(1.0);
    r(3, 2) = T(-1.0);
    return r;
  }
};

struct ModeSD {
  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    const T f = sin(x[0] * (2.0 * M_PI));
    M4<T> r;
    r(0, 1) = f;
    r(1, 0) = T(0.0) - f;
    r(2, 3) = f;
    r(3, 2) = T(0.0) - f;
    return r;
  }
};

struct FrameSD {
  Mat4Fn metric;
  template <class T>
  M4<T> operator()(const V4<T>& xv) const {
    const Vec4d x(value_of(xv[0]), value_of(xv[1]), value_of(xv[2]), value_of(xv[3]));
    const auto g = metric.template operator()<T>(x);
    const auto L = cholesky_lower4(g);
    std::array<M4<T>, 3> sdb, asdb;
    sd_bases_from_coframe(L, sdb, asdb);
    M4<T> r;
    const T c = sin(xv[0] * (2.0 * M_PI));
    for (int k = 0; k < 16; ++k)
      r.a[k] = sdb[0].a[k] * c + sdb[1].a[k] * 0.4 + sdb[2].a[k] * 0.25;
    return r;
  }
};

struct ModeSigma {
  template <class T>
  T operator()(const V4<T>& x) const {
    return 1.0 + 0.1 * sin(x[0] * (2.0 * M_PI));
  }
};

}  // namespace

TEST_CASE("s3xs1 global coframe is orthonormal and oriented") {
  const auto bg = bg_of("s3xs1");
  for (const Vec4d& x : {Vec4d(0.3, 0.7, 1.9, 0.4), Vec4d(1.2, 4.0, 0.2, 5.1)}) {
    const auto th = s3xs1_coframe(jet_coords<double>(x));
    const auto pk = pack_point(bg, x, 2);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double s = 0;
        for (int al = 0; al < 4; ++al) s += th(a, al) * th(b, al);
        CHECK(s == doctest::Approx(pk.g(a, b)).epsilon(1e-13));
      }
    std::array<M4<double>, 3> sdb, asdb;
    sd_bases_from_coframe(th, sdb, asdb);
    for (int i = 0; i < 3; ++i) {
      const auto sp = hodge_star(sdb[i], pk);
      const auto sm = hodge_star(asdb[i], pk);
      for (int k = 0; k < 16; ++k) {
        CHECK(sp.a[k] == doctest::Approx(sdb[i].a[k]).epsilon(5e-12));
        CHECK(sm.a[k] == doctest::Approx(-asdb[i].a[k]).epsilon(5e-12));
      }
    }
  }
}

TEST_CASE("killing operator examples") {
  const auto flat = bg_of("flat_t4");
  auto k0 = geometry::killing_point(flat, CovectorFn::make(ConstCov{}), Vec4d(0.2, 0.4, 0.6, 0.8));
  for (double v : k0.a) CHECK(std::abs(v) < 1e-14);

  const Vec4d x(0.3, 0.1, 0.9, 0.2);
  auto k1 = geometry::killing_point(flat, CovectorFn::make(ModeCov{}), x);
  CHECK(k1(0, 1) == doctest::Approx(2.0 * M_PI * std::cos(2.0 * M_PI * 0.3)).epsilon(1e-12));
  double tr = 0;
  for (int a = 0; a < 4; ++a) tr += k1(a, a);
  CHECK(std::abs(tr) < 1e-12);

  const auto s4 = bg_of("round_s4");
  auto k2 = geometry::killing_point(s4, CovectorFn::make(RotCov{}), Vec4d(0.4, -0.2, 0.8, 0.1));
  for (double v : k2.a) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("riemann commutator convention on random background") {
  const auto bg = bg_of("perturbed_flat");
  std::mt19937_64 rng(11);
  const auto om = random_covector(bg, rng, 1.0);
  for (const Vec4d& x : {Vec4d(0.2, 0.6, 0.1, 0.9), Vec4d(0.8, 0.3, 0.5, 0.7)})
    CHECK(geometry::commutator_residual_point(bg, om, x) < 1e-10);
}

TEST_CASE("bianchi identity (n-3) C = div W on perturbed flat") {
  const auto bg = bg_of("perturbed_flat");
  CHECK(geometry::bianchi_residual_point(bg, Vec4d(0.23, 0.71, 0.42, 0.09)) < 1e-10);
}

TEST_CASE("hodge weitzenboeck residual") {
  const auto flat = bg_of("flat_t4");
  auto r0 = geometry::hodge_weitzenboeck_residual_point(flat, Mat4Fn::make(ConstSD{}),
                                                        Vec4d(0.1, 0.2, 0.3, 0.4));
  for (double v : r0.a) CHECK(std::abs(v) < 1e-13);

  auto r1 = geometry::hodge_weitzenboeck_residual_point(flat, Mat4Fn::make(ModeSD{}),
                                                        Vec4d(0.31, 0.2, 0.3, 0.4));
  for (double v : r1.a) CHECK(std::abs(v) < 1e-9);

  const auto s4 = bg_of("round_s4");
  std::mt19937_64 rng(5);
  const auto om = random_two_form(s4, rng, 1.0);
  auto r2 = geometry::hodge_weitzenboeck_residual_point(s4, om, Vec4d(0.5, -0.3, 0.2, 0.8));
  for (double v : r2.a) CHECK(std::abs(v) < 1e-9);

  const auto pf = bg_of("perturbed_flat");
  auto r3 = geometry::hodge_weitzenboeck_residual_point(pf, Mat4Fn::make(FrameSD{pf.metric}),
                                                        Vec4d(0.21, 0.82, 0.43, 0.64));
  for (double v : r3.a) CHECK(std::abs(v) < 2e-8);
}

TEST_CASE("conformal rescale and Schouten transformation") {
  const auto flat = bg_of("flat_t4");
  std::mt19937_64 rng(7);
  const auto w = random_scalar(flat, rng, 0.1);
  const auto hat = geometry::conformal_rescale(flat, w);
  for (const Vec4d& x : {Vec4d(0.3, 0.6, 0.2, 0.8), Vec4d(0.05, 0.33, 0.71, 0.52)}) {
    const auto res = geometry::schouten_transform_residual_point(flat, hat, w, x);
    for (double v : res.a) CHECK(std::abs(v) < 1e-10);
  }
  const auto hatc = geometry::conformal_rescale(flat, constant_scalar(0.37));
  const auto pk = pack_point(hatc, Vec4d(0.4, 0.1, 0.6, 0.2), 2);
  for (double v : pk.P.a) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("almost einstein residual examples") {
  const auto s4 = bg_of("round_s4");
  auto r =
      geometry::almost_einstein_residual_point(s4, constant_scalar(1.0), Vec4d(0.3, 0.2, -0.5, 0.7));
  for (double v : r.a) CHECK(std::abs(v) < 1e-11);

  const auto prod = bg_of("s3xs1");
  const Vec4d xp(0.7, 1.1, 2.3, 0.4);
  auto rp = geometry::almost_einstein_residual_point(prod, constant_scalar(1.0), xp);
  const auto pk = pack_point(prod, xp, 2);
  for (int i = 0; i < 16; ++i) CHECK(rp.a[i] == doctest::Approx(pk.P0.a[i]).epsilon(1e-12));

  const auto flat = bg_of("flat_t4");
  const Vec4d xf(0.37, 0.5, 0.5, 0.5);
  auto rf = geometry::almost_einstein_residual_point(flat, ScalarFn::make(ModeSigma{}), xf);
  const double hess00 = -0.1 * 4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * 0.37);
  CHECK(rf(0, 0) == doctest::Approx(0.75 * hess00).epsilon(1e-11));
  CHECK(rf(1, 1) == doctest::Approx(-0.25 * hess00).epsilon(1e-11));
}

TEST_CASE("decompose_from validates curvature symmetries") {
  M4<double> g;
  for (int i = 0; i < 4; ++i) g(i, i) = 1.0;
  T4<double> bad;
  bad(0, 1, 2, 3) = 1.0;  // no antisymmetry partner
  CHECK_THROWS_AS(geometry::decompose_from(g, bad), PreconditionError);
}

TEST_CASE("lattice stencil path: flat christoffel and S4 convergence") {
  GeometrySpec s;
  s.name = "flat_t4";
  s.sites = 8;
  const auto flat = make_background(s);
  LatField<M4<double>> g(flat.lat);
  for (std::int64_t i = 0; i < flat.lat.nsites(); ++i)
    g.v[static_cast<std::size_t>(i)] = flat.g<double>(flat.lat.coords(flat.lat.unpack(i)));
  const auto Gam = christoffel_lattice(g);
  for (const auto& G : Gam.v)
    for (double v : G.a) CHECK(std::abs(v) < 1e-13);

  GeometrySpec s4a;
  s4a.name = "round_s4";
  s4a.sites = 12;
  GeometrySpec s4b = s4a;
  s4b.sites = 24;
  const double e1 = geometry::lattice_scalar_curvature_error(make_background(s4a), 12.0, 1.0);
  const double e2 = geometry::lattice_scalar_curvature_error(make_background(s4b), 12.0, 1.0);
  CHECK(e1 / e2 >= 8.0);  // 4th-order stencils: expect ~16
}

TEST_CASE("degenerate lattice metric raises with site index") {
  GeometrySpec s;
  s.name = "flat_t4";
  s.sites = 4;
  const auto flat = make_background(s);
  LatField<M4<double>> g(flat.lat);
  for (std::int64_t i = 0; i < flat.lat.nsites(); ++i)
    g.v[static_cast<std::size_t>(i)] = flat.g<double>(flat.lat.coords(flat.lat.unpack(i)));
  g.v[37](1, 1) = -1.0;
  CHECK_THROWS_AS(christoffel_lattice(g), DegenerateMetricError);
}
