#include "asdlab/background.hpp"

#include <cmath>

namespace asdlab {

namespace {

struct FlatMetric {
  template <class T>
  M4<T> operator()(const V4<T>&) const {
    M4<T> g;
    for (int i = 0; i < 4; ++i) g(i, i) = T(1.0);
    return g;
  }
};

// g = delta + eps * sum_m C^m_ab cos(2 pi k_m . x / E + phi_m), frequency-one
// integer modes so the perturbation is smooth and periodic on the torus.
struct PerturbedFlatMetric {
  double eps = 1e-3;
  double extent = 1.0;
  static constexpr int kModes = 6;
  std::array<M4<double>, kModes> C{};
  std::array<std::array<int, 4>, kModes> k{};
  std::array<double, kModes> phase{};

  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    M4<T> g;
    for (int i = 0; i < 4; ++i) g(i, i) = T(1.0);
    const double twopi = 2.0 * M_PI / extent;
    for (int m = 0; m < kModes; ++m) {
      T arg(phase[m]);
      for (int a = 0; a < 4; ++a)
        if (k[m][a] != 0) arg += x[a] * (twopi * k[m][a]);
      const T c = cos(arg);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) += c * (eps * C[m](i, j));
    }
    return g;
  }
};

// Round S^4 on a sinh-compactified stereographic chart: x_a = sinh(s_a),
// g = (2/(1+|x|^2))^2 dx^2, so g is diagonal with entries phi^2 cosh^2(s_a).
struct RoundS4Metric {
  template <class T>
  M4<T> operator()(const V4<T>& s) const {
    T r2(0.0);
    V4<T> ch;
    for (int a = 0; a < 4; ++a) {
      const T sh = sinh(s[a]);
      ch[a] = cosh(s[a]);
      r2 += sh * sh;
    }
    const T phi = 2.0 / (1.0 + r2);
    const T phi2 = phi * phi;
    M4<T> g;
    for (int a = 0; a < 4; ++a) g(a, a) = phi2 * ch[a] * ch[a];
    return g;
  }
};

// S^3(1) x S^1 in Hopf coordinates (eta, xi1, xi2, theta).
struct S3xS1Metric {
  template <class T>
  M4<T> operator()(const V4<T>& x) const {
    M4<T> g;
    const T se = sin(x[0]), ce = cos(x[0]);
    g(0, 0) = T(1.0);
    g(1, 1) = se * se;
    g(2, 2) = ce * ce;
    g(3, 3) = T(1.0);
    return g;
  }
};

int axis_sites(const GeometrySpec& s, int a) {
  return s.sites4[a] > 0 ? s.sites4[a] : s.sites;
}

}  // namespace

Background make_background(const GeometrySpec& spec) {
  Background bg;
  bg.spec = spec;
  bg.name = spec.name;
  if (spec.name == "flat_t4") {
    for (int a = 0; a < 4; ++a)
      bg.lat.ax[a] = ChartLattice::periodic_axis(spec.extent, axis_sites(spec, a));
    bg.metric = Mat4Fn::make(FlatMetric{});
    bg.lcf = true;
  } else if (spec.name == "perturbed_flat") {
    for (int a = 0; a < 4; ++a)
      bg.lat.ax[a] = ChartLattice::periodic_axis(spec.extent, axis_sites(spec, a));
    PerturbedFlatMetric m;
    m.eps = spec.epsilon;
    m.extent = spec.extent;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> axpick(0, 3);
    for (int mm = 0; mm < PerturbedFlatMetric::kModes; ++mm) {
      for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) m.C[mm](i, j) = m.C[mm](j, i) = u(rng);
      // one- or two-hot frequency vector
      m.k[mm] = {0, 0, 0, 0};
      m.k[mm][axpick(rng)] = 1;
      if (mm % 2 == 1) m.k[mm][axpick(rng)] += 1;
      m.phase[mm] = M_PI * u(rng);
    }
    bg.metric = Mat4Fn::make(m);
    bg.lcf = false;
  } else if (spec.name == "round_s4") {
    const double S = 3.5;
    for (int a = 0; a < 4; ++a)
      bg.lat.ax[a] = ChartLattice::analytic_axis(-S, 2.0 * S, axis_sites(spec, a));
    bg.metric = Mat4Fn::make(RoundS4Metric{});
    bg.lcf = true;
  } else if (spec.name == "s3xs1") {
    const double L = spec.extent > 0 ? spec.extent : 2.0 * M_PI;
    bg.lat.ax[0] = ChartLattice::analytic_axis(0.0, 0.5 * M_PI, axis_sites(spec, 0));
    bg.lat.ax[1] = ChartLattice::periodic_axis(2.0 * M_PI, axis_sites(spec, 1));
    bg.lat.ax[2] = ChartLattice::periodic_axis(2.0 * M_PI, axis_sites(spec, 2));
    bg.lat.ax[3] = ChartLattice::periodic_axis(L, axis_sites(spec, 3));
    // Quadrature in eta follows the Fejer-1 rule mapped through t = cos(2 eta)
    // so that xi-averaged integrands are integrated spectrally; the volume
    // density sin(eta) cos(eta) is divided out here and re-enters through the
    // per-site volume factor.
    const int n = bg.lat.ax[0].sites;
    const auto w = fejer1_weights(n);
    for (int j = 0; j < n; ++j) {
      const double eta = bg.lat.ax[0].coord[j];
      bg.lat.ax[0].qw[j] = w[j] / (4.0 * std::sin(eta) * std::cos(eta));
    }
    bg.metric = Mat4Fn::make(S3xS1Metric{});
    bg.lcf = true;
  } else {
    throw ConfigError("unknown geometry key: " + spec.name);
  }
  return bg;
}

std::vector<Idx4> subsample_sites(const ChartLattice& lat, int count,
                                  unsigned long long seed, int margin) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Idx4> out;
  out.reserve(count);
  std::uniform_int_distribution<std::int64_t> pick(0, lat.nsites() - 1);
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard < 1000 * count) {
    ++guard;
    const Idx4 i = lat.unpack(pick(rng));
    if (lat.stencil_interior(i, margin)) out.push_back(i);
  }
  return out;
}

}  // namespace asdlab
