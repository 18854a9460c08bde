#pragma once

// Model geometries and the scalar-generic sampler plumbing. A background is
// a closed-form metric functor evaluable on double or Jet scalars over a
// chart lattice; everything downstream differentiates by evaluating on jets.

#include <memory>
#include <random>
#include <string>

#include "asdlab/jet.hpp"
#include "asdlab/lattice.hpp"
#include "asdlab/smalltensor.hpp"
#include "asdlab/util.hpp"

namespace asdlab {

template <class T>
V4<T> jet_coords(const Vec4d& x) {
  V4<T> r;
  for (int a = 0; a < 4; ++a) {
    if constexpr (std::is_same_v<T, double>) {
      r[a] = x[a];
    } else {
      r[a] = jet_variable<T::deg>(x[a], a);
    }
  }
  return r;
}

// Type-erased closed-form field with evaluation at every jet degree.
template <template <class> class V>
struct JetFn {
  struct Iface {
    virtual V<double> e0(const Vec4d&) const = 0;
    virtual V<Jet1> e1(const Vec4d&) const = 0;
    virtual V<Jet2> e2(const Vec4d&) const = 0;
    virtual V<Jet3> e3(const Vec4d&) const = 0;
    virtual V<Jet4> e4(const Vec4d&) const = 0;
    virtual ~Iface() = default;
  };
  template <class F>
  struct Impl final : Iface {
    F f;
    explicit Impl(F fn) : f(std::move(fn)) {}
    V<double> e0(const Vec4d& x) const override { return f(jet_coords<double>(x)); }
    V<Jet1> e1(const Vec4d& x) const override { return f(jet_coords<Jet1>(x)); }
    V<Jet2> e2(const Vec4d& x) const override { return f(jet_coords<Jet2>(x)); }
    V<Jet3> e3(const Vec4d& x) const override { return f(jet_coords<Jet3>(x)); }
    V<Jet4> e4(const Vec4d& x) const override { return f(jet_coords<Jet4>(x)); }
  };

  std::shared_ptr<const Iface> p;
  explicit operator bool() const { return static_cast<bool>(p); }

  template <class F>
  static JetFn make(F f) {
    JetFn r;
    r.p = std::make_shared<Impl<F>>(std::move(f));
    return r;
  }

  template <class T>
  V<T> operator()(const Vec4d& x) const {
    if constexpr (std::is_same_v<T, double>) {
      return p->e0(x);
    } else if constexpr (std::is_same_v<T, Jet0>) {
      const V<double> r0 = p->e0(x);
      if constexpr (std::is_same_v<V<double>, double>) {
        return Jet0(r0);
      } else {
        V<Jet0> r;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = Jet0(r0.a[i]);
        return r;
      }
    } else if constexpr (std::is_same_v<T, Jet1>) {
      return p->e1(x);
    } else if constexpr (std::is_same_v<T, Jet2>) {
      return p->e2(x);
    } else if constexpr (std::is_same_v<T, Jet3>) {
      return p->e3(x);
    } else {
      return p->e4(x);
    }
  }
};

template <class T>
using IdScalar = T;
template <class T>
struct M3 {
  std::array<T, 9> a{};
  T& operator()(int i, int j) { return a[3 * i + j]; }
  const T& operator()(int i, int j) const { return a[3 * i + j]; }
};

using ScalarFn = JetFn<IdScalar>;
using CovectorFn = JetFn<V4>;
using Mat4Fn = JetFn<M4>;
using Sym3Fn = JetFn<M3>;
using Ten4Fn = JetFn<T4>;

// ---------------------------------------------------------------------------

struct GeometrySpec {
  std::string name = "flat_t4";  // flat_t4 | round_s4 | s3xs1 | perturbed_flat
  int sites = 16;                // per-axis default
  Idx4 sites4 = {0, 0, 0, 0};    // optional per-axis override (0 = use `sites`)
  double extent = 1.0;           // torus edge length / S^1 length for s3xs1
  unsigned long long seed = 1;
  double epsilon = 1e-3;         // perturbed_flat amplitude
};

struct Background {
  std::string name;
  GeometrySpec spec;
  ChartLattice lat;
  Mat4Fn metric;
  bool lcf = false;  // conformally flat model (W == 0 analytically)

  template <class T>
  M4<T> g(const Vec4d& x) const {
    return metric.template operator()<T>(x);
  }
};

Background make_background(const GeometrySpec& spec);

// Deterministic interior site subsample for pointwise residual sweeps.
std::vector<Idx4> subsample_sites(const ChartLattice& lat, int count,
                                  unsigned long long seed, int margin = 2);

}  // namespace asdlab
