#pragma once

// Q-curvature, the Paneitz operator, the appendix functionals and their
// global invariants, the conformal-Laplacian ground state, and the
// unobstructedness certificate.

#include "asdlab/background.hpp"
#include "asdlab/curvature.hpp"
#include "asdlab/latfield.hpp"

namespace asdlab::conformal {

struct Gammas {
  double g1p = 0, g1m = 0, g2 = -6.0, g3 = -0.5, g4 = 0;
};

// P phi = Delta^2 phi + div((2/3) R grad phi - 2 Ric(grad phi, .))
double paneitz_point(const Background& bg, const ScalarFn& phi, const Vec4d& x);

// Q_ghat e^{4w} - (Q_g + P_g w), the four-dimensional transformation law.
double q_transformation_residual_point(const Background& bg, const Background& rescaled,
                                       const ScalarFn& w, const Vec4d& x);

struct FunctionalReport {
  double I_plus = 0, I_minus = 0, II = 0, III = 0, IV = 0, Phi = 0;
  double kappa = 0, totalQ = 0;
  double gammas[5] = {0, 0, 0, 0, 0};
  double volume_g = 0, volume_hat = 0;
  double W_plus_l2 = 0, W_minus_l2 = 0;
  double IV_rescaled = 0;  // independent route: int R_ghat dv_ghat / Vol^(1/2)
  const char* quadratic_term_measure = "dv_g";  // measure used in int w P w
};
FunctionalReport evaluate_functionals(const Background& bg, const ScalarFn& w, const Gammas& ga);

struct TotalInvariants {
  double totalQ = 0, chi_est = 0, tau_est = 0;
  double W_l2 = 0, W_plus_l2 = 0, W_minus_l2 = 0;
  double volume = 0;
  double q_form_mismatch = 0;  // sup |Q - Q_alt| over sites
};
TotalInvariants total_invariants(const Background& bg);

struct AdamsReport {
  bool ok = false;
  double margin = 0, totalQ = 0;
};
AdamsReport adams_check(double totalQ);

struct EigenReport {
  double lambda1 = 0;
  double residual = 0;  // |L phi - lambda phi| / |phi|, volume-weighted L2
  int iterations = 0;
  bool positive = false;
  ScalarLat eigenfield;
};
EigenReport conformal_laplacian_lambda1(const Background& bg, int max_iters = 200,
                                        double tol = 1e-10);

struct Certificate {
  bool unobstructed = false;
  double lhs = 0, rhs = 0;        // 2 chi + 3 tau vs -Y^2 / (24 pi^2)
  double q_lhs = 0, q_rhs = 0;    // total-Q form via Eq. (Qt)
};
Certificate certify(long long chi, long long tau, double yamabe);

// Lattice conformal factor with cached derived fields.
struct ConformalFactorField {
  ScalarLat w, e2w, e4w, lapw, gradw2;
  std::array<ScalarLat, 4> dw;
  void set(const Background& bg, const ScalarLat& win);
  double cache_residual(const Background& bg) const;  // consistency probe
};

}  // namespace asdlab::conformal
