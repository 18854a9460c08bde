#pragma once

// Standard tractor bundle in a fixed scale. Components (sigma, mu_a, rho)
// are stored against the running metric; conformal changes of splitting are
// explicit operations and every contraction uses the fixed metric, which
// makes the pairing invariance and the w -> -w round trip exact algebra.

#include "asdlab/background.hpp"
#include "asdlab/curvature.hpp"

namespace asdlab::tractor {

// weight-tagged conformal density
struct Density {
  ScalarFn f;
  int weight = 0;
};

template <int K>
struct TractorJet {
  Jet<K> sigma;
  V4<Jet<K>> mu;
  Jet<K> rho;
};
using TractorValue = TractorJet<0>;

// closed-form tractor field (components carry weights (1,1,-1))
struct TractorField {
  ScalarFn sigma;
  CovectorFn mu;
  ScalarFn rho;

  template <int K>
  TractorJet<K> eval(const Vec4d& x) const {
    TractorJet<K> r;
    r.sigma = sigma.template operator()<Jet<K>>(x);
    r.mu = mu.template operator()<Jet<K>>(x);
    r.rho = rho.template operator()<Jet<K>>(x);
    return r;
  }
};

// D_A sigma / n in the fixed scale: (sigma, nabla sigma, -(Delta+J) sigma / 4).
// Requires a weight-one density.
template <int K>
TractorJet<K> thomas_D_jets(const Background& bg, const ScalarFn& sigma, const Vec4d& x);
TractorValue thomas_D_point(const Background& bg, const Density& sigma, const Vec4d& x);

// h(V, W) = g^{ab} mu_a nu_b + sigma_V rho_W + sigma_W rho_V
double pair_point(const TractorValue& V, const TractorValue& W, const M4<double>& ginv);

// Tractor connection: component formula of Eq. (tr-conn); index a first.
template <int K>
std::array<TractorJet<K - 1>, 4> tractor_connection_jets(const TractorJet<K>& V,
                                                         const GeomJets<K - 1>& gj);

// (sigma, mu, rho) -> (sigma, mu + sigma Upsilon, rho - Upsilon.mu - |Upsilon|^2 sigma / 2),
// all contractions against the supplied fixed metric.
TractorValue conformal_transform(const TractorValue& V, const V4<double>& upsilon,
                                 const M4<double>& ginv);

// 6x6 change-of-splitting matrix acting on covector-tractor components.
// The weighted variant additionally scales the slots by e^{w_value * weight}
// with slot weights (1, 1, -1): that is the matrix the fixed-metric
// trivialization assigns to components of an invariant section.
using Mat6 = std::array<std::array<double, 6>, 6>;
Mat6 splitting_transport(const V4<double>& upsilon, const M4<double>& ginv);
Mat6 splitting_transport_weighted(const V4<double>& upsilon, const M4<double>& ginv,
                                  double w_value);

// Adjoint-tractor-valued two-form in the projector-pair basis
//   a (X Y - Y X) + b^k (X Z_k - Z_k X) + c^k (Y Z_k - Z_k Y)
//   + d^{kl} (Z_k Z_l - Z_l Z_k),  d antisymmetric in (k,l),
// with (i,j) the two-form indices.
template <class T>
struct AdjBlocks {
  M4<T> a;
  T3<T> b, c;  // (i, j, k)
  T4<T> d;     // (i, j, k, l)
};
using AdjBlocksValue = AdjBlocks<double>;

// Tractor curvature kappa_{ij AB} of Eq. (trc2): d = W/2, b = -C^k_{ij}.
AdjBlocksValue tractor_curvature_point(const PackPoint& pk);

// Action of an adjoint two-form on covector-tractor components through the
// tractor metric: slots (0, 2 d_c^d mu_d - b_c sigma, b^c mu_c) per (i,j).
TractorValue adj_action(const AdjBlocksValue& k, int i, int j, const TractorValue& V,
                        const M4<double>& g, const M4<double>& ginv);

// Componentwise 6x6 materialization z_{ij A B} and block extraction; used
// by the brute-force connection oracle.
template <class T>
using Adj66 = std::array<T, 576>;  // layout [i][j][A][B]
inline int adj66_index(int i, int j, int A, int B) { return ((i * 4 + j) * 6 + A) * 6 + B; }

template <class T>
Adj66<T> adj66_from_blocks(const AdjBlocks<T>& blk, const M4<T>& g);
template <class T>
AdjBlocks<T> blocks_from_adj66(const Adj66<T>& z, const M4<T>& ginv);

// Coupled Levi-Civita x tractor covariant derivative of a component array
// with `ncoord` leading coordinate slots before [i][j][A][B]; returns the
// array with one more leading coordinate slot.
template <int K>
std::vector<Jet<K - 1>> coupled_covd(const std::vector<Jet<K>>& comp, int ncoord,
                                     const GeomJets<K - 1>& gj);

// Residual table of Eq. (DTable) applied to the projector component
// patterns; exact algebraic zeros by construction of the implementation.
double projector_derivative_residual(const PackPoint& pk);

}  // namespace asdlab::tractor
