#include <cmath>
#include <random>

#include "asdlab/conformal.hpp"
#include "asdlab/geometry.hpp"
#include "asdlab/random_fields.hpp"
#include "doctest.h"

using namespace asdlab;
using namespace asdlab::conformal;

namespace {
Background bg_of(const std::string& name, int sites = 8, unsigned long long seed = 3) {
  GeometrySpec s;
  s.name = name;
  s.sites = sites;
  s.seed = seed;
  s.extent = (name == "flat_t4" || name == "perturbed_flat") ? 1.0 : 2.0 * M_PI;
  return make_background(s);
}
const double kYamabeS4 = 8.0 * std::sqrt(6.0) * M_PI;
}  // namespace

TEST_CASE("paneitz operator basics") {
  const auto flat = bg_of("flat_t4");
  const Vec4d x(0.23, 0.5, 0.1, 0.8);
  CHECK(std::abs(paneitz_point(flat, constant_scalar(2.5), x)) < 1e-10);
  // flat torus: P = Delta^2, single mode
  const auto mode = torus_mode(0, 1, 1.0, 1.0);
  const double expect = std::pow(2.0 * M_PI, 4) * std::sin(2.0 * M_PI * 0.23);
  CHECK(paneitz_point(flat, mode, x) == doctest::Approx(expect).epsilon(1e-10));

  // self-adjointness by quadrature on a curved background
  const auto pert = bg_of("perturbed_flat", 8);
  std::mt19937_64 rng(5);
  const auto phi = random_scalar(pert, rng, 1.0);
  const auto psi = random_scalar(pert, rng, 1.0);
  const auto vals = multi_integrate<2>(pert.lat, [&](const Idx4& i, std::array<double, 2>& v) {
    const Vec4d xx = pert.lat.coords(i);
    const auto fg = func_geom_point(pert, xx);
    const double pphi = paneitz_with(fg, phi.operator()<Jet4>(xx));
    const double ppsi = paneitz_with(fg, psi.operator()<Jet4>(xx));
    const double ph = phi.operator()<double>(xx), ps = psi.operator()<double>(xx);
    v[0] = fg.q.vol * ph * ppsi;
    v[1] = fg.q.vol * ps * pphi;
  });
  CHECK(vals[0] == doctest::Approx(vals[1]).epsilon(1e-7));

  // conformal covariance P_ghat phi e^{4w} = P_g phi
  const auto w = random_scalar(pert, rng, 0.15);
  const auto hat = geometry::conformal_rescale(pert, w);
  const auto phi2 = random_scalar(pert, rng, 1.0);
  for (const Vec4d& xx : {Vec4d(0.31, 0.62, 0.11, 0.83), Vec4d(0.74, 0.22, 0.58, 0.46)}) {
    const double lhs =
        paneitz_point(hat, phi2, xx) * std::exp(4.0 * w.operator()<double>(xx));
    const double rhs = paneitz_point(pert, phi2, xx);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }

  // Q transformation law Q_ghat e^{4w} = Q_g + P_g w
  for (const Vec4d& xx : {Vec4d(0.15, 0.35, 0.55, 0.75)})
    CHECK(std::abs(q_transformation_residual_point(pert, hat, w, xx)) < 1e-8);
}

TEST_CASE("total invariants on the model geometries") {
  const auto s4 = bg_of("round_s4", 12);
  const auto ti = total_invariants(s4);
  const double pi2 = M_PI * M_PI;
  CHECK(ti.totalQ == doctest::Approx(8.0 * pi2).epsilon(2e-5));
  CHECK(ti.chi_est == doctest::Approx(2.0).epsilon(2e-5));
  CHECK(std::abs(ti.tau_est) < 1e-8);
  CHECK(ti.volume == doctest::Approx(8.0 * pi2 / 3.0).epsilon(2e-5));
  CHECK(ti.q_form_mismatch < 1e-8);

  const auto flat = bg_of("flat_t4", 6);
  const auto tf = total_invariants(flat);
  CHECK(std::abs(tf.totalQ) < 1e-12);
  CHECK(std::abs(tf.chi_est) < 1e-12);
  CHECK(std::abs(tf.tau_est) < 1e-12);

  const auto prod = bg_of("s3xs1", 8);
  const auto tp = total_invariants(prod);
  CHECK(std::abs(tp.totalQ) < 1e-9);
  CHECK(std::abs(tp.chi_est) < 1e-9);
  CHECK(std::abs(tp.tau_est) < 1e-9);
  CHECK(tp.volume == doctest::Approx(4.0 * M_PI * M_PI * M_PI).epsilon(1e-12));

  // conformal invariance of the totals on a perturbed background
  const auto pert = bg_of("perturbed_flat", 10);
  std::mt19937_64 rng(7);
  const auto w = random_scalar(pert, rng, 0.1);
  const auto hat = geometry::conformal_rescale(pert, w);
  const auto t0 = total_invariants(pert);
  const auto t1 = total_invariants(hat);
  CHECK(std::abs(t1.totalQ - t0.totalQ) < 1e-5 * std::max(1.0, std::abs(t0.totalQ)));
  CHECK(t1.W_plus_l2 == doctest::Approx(t0.W_plus_l2).epsilon(1e-5));
  CHECK(t1.W_minus_l2 == doctest::Approx(t0.W_minus_l2).epsilon(1e-5));
}

TEST_CASE("functionals: Fourier oracles and model values") {
  Gammas ga;
  const auto flat = bg_of("flat_t4", 10);
  const auto mode = torus_mode(0, 1, 1.0, 1.0);
  const auto rep = evaluate_functionals(flat, mode, ga);
  const double p4 = std::pow(2.0 * M_PI, 4);
  // II = int w Delta^2 w dv = (2 pi)^4 / 2
  CHECK(rep.II == doctest::Approx(0.5 * p4).epsilon(1e-9));
  // III = 12 int (Delta w + |grad w|^2)^2 = 12 (7/8) (2 pi)^4
  CHECK(rep.III == doctest::Approx(10.5 * p4).epsilon(1e-9));
  CHECK(std::abs(rep.I_plus) < 1e-12);
  CHECK(std::abs(rep.I_minus) < 1e-12);

  const auto rep0 = evaluate_functionals(flat, constant_scalar(0.0), ga);
  CHECK(std::abs(rep0.II) < 1e-12);
  CHECK(std::abs(rep0.III) < 1e-12);
  CHECK(std::abs(rep0.IV) < 1e-12);

  const auto s4 = bg_of("round_s4", 12);
  const auto rs4 = evaluate_functionals(s4, constant_scalar(0.0), ga);
  CHECK(rs4.IV == doctest::Approx(kYamabeS4).epsilon(2e-5));
  CHECK(rs4.IV_rescaled == doctest::Approx(rs4.IV).epsilon(1e-6));
  CHECK(rs4.totalQ == doctest::Approx(8.0 * M_PI * M_PI).epsilon(2e-5));

  // constant shifts leave I, II, IV unchanged (exact scale invariance)
  const auto repc = evaluate_functionals(flat, constant_scalar(0.37), ga);
  CHECK(std::abs(repc.II) < 1e-10);
  CHECK(std::abs(repc.IV) < 1e-10);
  CHECK(std::abs(repc.I_plus) < 1e-10);
}

TEST_CASE("scale invariance of Phi on s3xs1") {
  const auto prod = bg_of("s3xs1", 5);
  std::mt19937_64 rng(11);
  Gammas ga;
  ga.g1p = 0.3;  // exercise every limb
  ga.g1m = -0.2;
  ga.g2 = -6.0;
  ga.g3 = -0.5;
  ga.g4 = -2.0 * 48.0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto w = random_scalar(prod, rng, 0.2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const double c = u(rng);
    const auto rep1 = evaluate_functionals(prod, w, ga);
    const auto rep2 = evaluate_functionals(prod, shifted_scalar(w, c), ga);
    CHECK(rep2.Phi == doctest::Approx(rep1.Phi).epsilon(1e-10));
    CHECK(rep2.IV == doctest::Approx(rep1.IV).epsilon(1e-10));
    CHECK(rep2.II == doctest::Approx(rep1.II).epsilon(1e-9));
  }
}

TEST_CASE("IV is bounded below by the model Yamabe constants") {
  std::mt19937_64 rng(13);
  Gammas ga;
  const auto flat = bg_of("flat_t4", 8);
  for (int t = 0; t < 3; ++t) {
    const auto w = random_scalar(flat, rng, 0.4);
    const auto rep = evaluate_functionals(flat, w, ga);
    CHECK(rep.IV >= -1e-10);  // Y(T4) = 0
  }
  const auto s4 = bg_of("round_s4", 10);
  for (int t = 0; t < 2; ++t) {
    const auto w = random_scalar(s4, rng, 0.2);
    const auto rep = evaluate_functionals(s4, w, ga);
    CHECK(rep.IV >= kYamabeS4 - 1e-3);
  }
}

TEST_CASE("adams bound check") {
  const auto prod = bg_of("s3xs1", 8);
  auto a = adams_check(total_invariants(prod).totalQ);
  CHECK(a.ok);
  CHECK(a.margin == doctest::Approx(8.0 * M_PI * M_PI).epsilon(1e-8));
  const auto s4 = bg_of("round_s4", 12);
  auto b = adams_check(total_invariants(s4).totalQ);
  CHECK_FALSE(b.ok);  // boundary case: the conformal sphere saturates
  CHECK(std::abs(b.margin) < 2e-3);
}

TEST_CASE("conformal laplacian ground state") {
  const auto flat = bg_of("flat_t4", 8);
  auto ef = conformal_laplacian_lambda1(flat);
  CHECK(std::abs(ef.lambda1) < 1e-9);
  CHECK(ef.residual < 1e-8);
  CHECK(ef.positive);

  const auto prod = bg_of("s3xs1", 8);
  auto ep = conformal_laplacian_lambda1(prod);
  CHECK(ep.lambda1 == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(ep.residual < 1e-8);
  CHECK(ep.positive);

  const auto s4 = bg_of("round_s4", 10);
  auto es = conformal_laplacian_lambda1(s4);
  CHECK(es.lambda1 == doctest::Approx(12.0).epsilon(1e-6));
  CHECK(es.positive);
}

TEST_CASE("certificates") {
  auto c1 = certify(2, 0, kYamabeS4);
  CHECK(c1.unobstructed);
  CHECK(c1.lhs == doctest::Approx(4.0));
  CHECK(c1.rhs == doctest::Approx(-16.0).epsilon(1e-12));
  auto c2 = certify(3, -1, 10.0);
  CHECK(c2.unobstructed);
  auto c3 = certify(-18, 0, 1.0);
  CHECK_FALSE(c3.unobstructed);
  CHECK_THROWS_AS(certify(2, 0, -1.0), HypothesisError);
}

TEST_CASE("conformal factor field caches stay consistent") {
  const auto prod = bg_of("s3xs1", 6);
  ScalarLat w(prod.lat);
  for (std::int64_t s = 0; s < prod.lat.nsites(); ++s) {
    const Vec4d x = prod.lat.coords(prod.lat.unpack(s));
    w.v[static_cast<std::size_t>(s)] = 0.1 * std::sin(x[3]) + 0.05 * std::cos(x[1]);
  }
  ConformalFactorField f;
  f.set(prod, w);
  CHECK(f.cache_residual(prod) < 1e-12);
}
