#pragma once

// Seeded random smooth test fields. On each model geometry the fields are
// built from globally smooth ingredients (torus trig modes, sphere ambient
// coordinates, the left-invariant S^3 frame) so identity checks and
// integration by parts are exercised on genuine tensor fields of the
// closed manifold.

#include <random>

#include "asdlab/background.hpp"

namespace asdlab {

ScalarFn random_scalar(const Background& bg, std::mt19937_64& rng, double amplitude,
                       int nmodes = 6);
CovectorFn random_covector(const Background& bg, std::mt19937_64& rng, double amplitude,
                           int nmodes = 6);
Mat4Fn random_two_form(const Background& bg, std::mt19937_64& rng, double amplitude,
                       int nmodes = 6);
// Symmetric trace-free 3x3 field (the five W+ components).
Sym3Fn random_sym3(const Background& bg, std::mt19937_64& rng, double amplitude, int nmodes = 6);

// Single torus mode helpers used by the Fourier oracles.
ScalarFn torus_mode(int axis, int k, double amplitude, double extent);

ScalarFn constant_scalar(double c);
ScalarFn shifted_scalar(const ScalarFn& f, double c);  // f + c

}  // namespace asdlab
