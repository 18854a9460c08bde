#pragma once

// Structured 4-D chart lattice: per-axis extents, site coordinates and
// quadrature weights. Periodic axes wrap stencil indices; analytic-interior
// axes place sites strictly inside the chart (midpoint offset) and leave
// derivative work near the boundary to closed-form samplers.

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "asdlab/util.hpp"

namespace asdlab {

using Vec4d = Eigen::Vector4d;
using Idx4 = std::array<int, 4>;

enum class AxisKind { periodic, analytic_interior };

struct Axis {
  double extent = 1.0;
  int sites = 8;
  AxisKind kind = AxisKind::periodic;
  double origin = 0.0;        // coordinate of the lattice start
  double spacing = 0.125;     // extent / sites
  std::vector<double> coord;  // site coordinates
  std::vector<double> qw;     // per-site quadrature weight (coordinate measure)
};

// Fejer-1 weights for integrating a smooth function over t in [-1,1] at the
// Chebyshev midpoints t_j = cos((2j+1) pi / (2n)).
inline std::vector<double> fejer1_weights(int n) {
  std::vector<double> w(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double th = (2.0 * j + 1.0) * M_PI / (2.0 * n);
    double s = 1.0;
    for (int m = 1; m <= n / 2; ++m) s -= 2.0 * std::cos(2.0 * m * th) / (4.0 * m * m - 1.0);
    w[j] = (2.0 / n) * s;
  }
  return w;
}

struct ChartLattice {
  std::array<Axis, 4> ax;

  static Axis periodic_axis(double extent, int sites) {
    Axis a;
    a.extent = extent;
    a.sites = sites;
    a.kind = AxisKind::periodic;
    a.spacing = extent / sites;
    a.origin = 0.0;
    a.coord.resize(sites);
    a.qw.assign(sites, a.spacing);
    for (int i = 0; i < sites; ++i) a.coord[i] = i * a.spacing;
    return a;
  }

  // Midpoint-uniform interior sites on [origin, origin+extent].
  static Axis analytic_axis(double origin, double extent, int sites) {
    Axis a;
    a.extent = extent;
    a.sites = sites;
    a.kind = AxisKind::analytic_interior;
    a.spacing = extent / sites;
    a.origin = origin;
    a.coord.resize(sites);
    a.qw.assign(sites, a.spacing);
    for (int i = 0; i < sites; ++i) a.coord[i] = origin + (i + 0.5) * a.spacing;
    return a;
  }

  std::int64_t nsites() const {
    return std::int64_t(ax[0].sites) * ax[1].sites * ax[2].sites * ax[3].sites;
  }

  Idx4 unpack(std::int64_t s) const {
    Idx4 i;
    i[3] = static_cast<int>(s % ax[3].sites);
    s /= ax[3].sites;
    i[2] = static_cast<int>(s % ax[2].sites);
    s /= ax[2].sites;
    i[1] = static_cast<int>(s % ax[1].sites);
    s /= ax[1].sites;
    i[0] = static_cast<int>(s);
    return i;
  }
  std::int64_t pack(const Idx4& i) const {
    return ((std::int64_t(i[0]) * ax[1].sites + i[1]) * ax[2].sites + i[2]) * ax[3].sites + i[3];
  }

  Vec4d coords(const Idx4& i) const {
    return Vec4d(ax[0].coord[i[0]], ax[1].coord[i[1]], ax[2].coord[i[2]], ax[3].coord[i[3]]);
  }

  double qweight(const Idx4& i) const {
    return ax[0].qw[i[0]] * ax[1].qw[i[1]] * ax[2].qw[i[2]] * ax[3].qw[i[3]];
  }

  // Eligibility for pure central lattice stencils of half-width `margin`.
  bool stencil_interior(const Idx4& i, int margin = 2) const {
    for (int a = 0; a < 4; ++a)
      if (ax[a].kind == AxisKind::analytic_interior &&
          (i[a] < margin || i[a] >= ax[a].sites - margin))
        return false;
    return true;
  }

  int wrap(int a, int i) const {
    const int n = ax[a].sites;
    const int m = i % n;
    return m < 0 ? m + n : m;
  }
};

// Quadrature of a per-site integrand against the coordinate measure; the
// caller folds in the volume density.
template <class F>
double integrate(const ChartLattice& lat, F&& persite) {
  return parallel_sum(lat.nsites(), [&](std::int64_t s) {
    const Idx4 i = lat.unpack(s);
    return persite(i) * lat.qweight(i);
  });
}

// Several integrals in one sweep; persite fills the integrand values (the
// coordinate-measure weight is applied here).
template <int NI, class F>
std::array<double, NI> multi_integrate(const ChartLattice& lat, F&& persite) {
  const std::int64_t n = lat.nsites();
  constexpr std::int64_t kChunk = 1024;
  const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<std::array<double, NI>> partial(static_cast<std::size_t>(nchunks));
  parallel_for(nchunks, [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      std::array<KahanSum, NI> ks;
      const std::int64_t b = c * kChunk, e = std::min(n, b + kChunk);
      std::array<double, NI> vals{};
      for (std::int64_t s = b; s < e; ++s) {
        const Idx4 i = lat.unpack(s);
        persite(i, vals);
        const double q = lat.qweight(i);
        for (int k = 0; k < NI; ++k) ks[k].add(vals[k] * q);
      }
      for (int k = 0; k < NI; ++k) partial[static_cast<std::size_t>(c)][k] = ks[k].get();
    }
  });
  std::array<double, NI> out{};
  for (const auto& p : partial)
    for (int k = 0; k < NI; ++k) out[k] += p[k];
  return out;
}

}  // namespace asdlab
