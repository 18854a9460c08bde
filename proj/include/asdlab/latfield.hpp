#pragma once

// Lattice-valued fields and 4th-order finite-difference stencils. These
// carry data with no closed form (solver iterates, eigenfields, loaded
// dumps); closed-form fields differentiate through jets instead. Periodic
// axes wrap; analytic-interior axes fall back to one-sided 4th-order
// stencils within two sites of the chart boundary.

#include <vector>

#include "asdlab/lattice.hpp"
#include "asdlab/smalltensor.hpp"
#include "asdlab/util.hpp"

namespace asdlab {

template <class T>
struct LatField {
  const ChartLattice* lat = nullptr;
  std::vector<T> v;

  LatField() = default;
  explicit LatField(const ChartLattice& l) : lat(&l), v(static_cast<std::size_t>(l.nsites())) {}
  T& at(const Idx4& i) { return v[static_cast<std::size_t>(lat->pack(i))]; }
  const T& at(const Idx4& i) const { return v[static_cast<std::size_t>(lat->pack(i))]; }
};

using ScalarLat = LatField<double>;

namespace detail {
inline void axpy(double& y, double a, const double& x) { y += a * x; }
template <class T>
void axpy(T& y, double a, const T& x) {
  for (std::size_t i = 0; i < y.a.size(); ++i) y.a[i] += a * x.a[i];
}

// 4th-order first-derivative stencils at offsets relative to the site.
struct Stencil {
  int off[6];
  double w[6];
  int n;
};
inline Stencil central4() { return {{-2, -1, 1, 2, 0, 0}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12, 0, 0}, 4}; }
inline Stencil fwd4_0() {
  return {{0, 1, 2, 3, 4, 0}, {-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12, 0}, 5};
}
inline Stencil fwd4_1() {
  return {{-1, 0, 1, 2, 3, 0}, {-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12, 0}, 5};
}
}  // namespace detail

// d/dx_axis of a lattice field.
template <class T>
LatField<T> lat_deriv(const LatField<T>& f, int axis) {
  const ChartLattice& lat = *f.lat;
  const Axis& ax = lat.ax[axis];
  LatField<T> r(lat);
  const double ih = 1.0 / ax.spacing;
  parallel_for(lat.nsites(), [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t s = b; s < e; ++s) {
      const Idx4 i = lat.unpack(s);
      detail::Stencil st = detail::central4();
      double sign = 1.0;
      if (ax.kind == AxisKind::analytic_interior) {
        const int j = i[axis];
        if (j == 0) st = detail::fwd4_0();
        else if (j == 1) st = detail::fwd4_1();
        else if (j == ax.sites - 1) { st = detail::fwd4_0(); sign = -1.0; }
        else if (j == ax.sites - 2) { st = detail::fwd4_1(); sign = -1.0; }
      }
      T acc{};
      for (int k = 0; k < st.n; ++k) {
        Idx4 ii = i;
        int jj = i[axis] + static_cast<int>(sign) * st.off[k];
        ii[axis] = (ax.kind == AxisKind::periodic) ? lat.wrap(axis, jj) : jj;
        detail::axpy(acc, sign * st.w[k] * ih, f.v[static_cast<std::size_t>(lat.pack(ii))]);
      }
      r.v[static_cast<std::size_t>(s)] = acc;
    }
  });
  return r;
}

// Lattice-stencil Levi-Civita connection of a stored metric field.
LatField<T3<double>> christoffel_lattice(const LatField<M4<double>>& g);

// Ricci and scalar curvature from a stored Christoffel field.
void ricci_lattice(const LatField<T3<double>>& Gam, const LatField<M4<double>>& g,
                   LatField<M4<double>>& ric_out, ScalarLat& r_out);

}  // namespace asdlab
