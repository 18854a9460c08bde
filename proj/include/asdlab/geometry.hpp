#pragma once

// Geometry-module operations: curvature decomposition entry points, Hodge
// two-form machinery, the Killing operator, conformal rescaling and the
// classical identity residuals.

#include "asdlab/background.hpp"
#include "asdlab/curvature.hpp"
#include "asdlab/latfield.hpp"

namespace asdlab::geometry {

// e^{2w} g as a new background over the same chart lattice.
Background conformal_rescale(const Background& bg, const ScalarFn& w);

// Trace-adjusted symmetrized derivative K(omega)_ij = nabla_i omega_j +
// nabla_j omega_i - (1/2)(div omega) g_ij; trace-free in dimension four.
M4<double> killing_point(const Background& bg, const CovectorFn& omega, const Vec4d& x);

// [nabla_a,nabla_b] omega_c - R_abc^d omega_d, sup over components.
double commutator_residual_point(const Background& bg, const CovectorFn& omega, const Vec4d& x);

// Residual of the Hodge Weitzenboeck formula Delta_2 omega = Delta omega
// + 2 W+(omega) - R/3 omega with Delta_2 = -(d delta + delta d).
M4<double> hodge_weitzenboeck_residual_point(const Background& bg, const Mat4Fn& omega,
                                             const Vec4d& x);

// P(ghat) - [P - nabla Upsilon + Upsilon Upsilon - 1/2 |Upsilon|^2 g].
M4<double> schouten_transform_residual_point(const Background& bg, const Background& rescaled,
                                             const ScalarFn& w, const Vec4d& x);

// Almost-Einstein residual: trace-free part of Hess(sigma) + P0 sigma.
M4<double> almost_einstein_residual_point(const Background& bg, const ScalarFn& sigma,
                                          const Vec4d& x);

// (n-3) C_abc - nabla^d W_dabc, sup over components (Bianchi identity).
double bianchi_residual_point(const Background& bg, const Vec4d& x);

// Pure-algebra decomposition of supplied curvature data; validates the
// curvature symmetries and throws PreconditionError when they fail.
struct AlgebraicPack {
  M4<double> Ric, P, P0;
  double R = 0, J = 0;
  T4<double> W;
};
AlgebraicPack decompose_from(const M4<double>& g, const T4<double>& Rm, double sym_tol = 1e-8);

// Lattice-stencil curvature benchmark: max |R - R_exact| over interior
// sites with |coord| below `window` on every analytic axis.
double lattice_scalar_curvature_error(const Background& bg, double r_exact, double window);

void check_finite(const LatField<double>& f, const char* what);

}  // namespace asdlab::geometry
