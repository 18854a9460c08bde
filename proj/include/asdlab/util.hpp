#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace asdlab {

// Reductions are chunked in a fixed order with compensated in-chunk sums, so
// results are identical for any thread count.
inline int& global_threads() {
  static int n = static_cast<int>(std::thread::hardware_concurrency());
  return n;
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double get() const { return s; }
};

inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
  const int nt = std::max(1, global_threads());
  if (nt == 1 || n < 1024) {
    body(0, n);
    return;
  }
  const std::int64_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> ts;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t b = t * chunk, e = std::min<std::int64_t>(n, b + chunk);
    if (b >= e) break;
    ts.emplace_back([&, b, e] { body(b, e); });
  }
  for (auto& th : ts) th.join();
}

// f(i) -> double, summed over i in [0, n) deterministically.
template <class F>
double parallel_sum(std::int64_t n, F&& f) {
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
  parallel_for(nchunks, [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      KahanSum ks;
      const std::int64_t b = c * kChunk, e = std::min(n, b + kChunk);
      for (std::int64_t i = b; i < e; ++i) ks.add(f(i));
      partial[static_cast<std::size_t>(c)] = ks.get();
    }
  });
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.get();
}

template <class F>
double parallel_max(std::int64_t n, F&& f) {
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), -1e300);
  parallel_for(nchunks, [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      double m = -1e300;
      const std::int64_t b = c * kChunk, e = std::min(n, b + kChunk);
      for (std::int64_t i = b; i < e; ++i) m = std::max(m, f(i));
      partial[static_cast<std::size_t>(c)] = m;
    }
  });
  double m = -1e300;
  for (double p : partial) m = std::max(m, p);
  return m;
}

struct DegenerateMetricError : std::runtime_error {
  explicit DegenerateMetricError(const std::string& what) : std::runtime_error(what) {}
};
struct NonFiniteFieldError : std::runtime_error {
  explicit NonFiniteFieldError(const std::string& what) : std::runtime_error(what) {}
};
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};
struct HypothesisError : std::runtime_error {
  explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct IterationLimitError : std::runtime_error {
  explicit IterationLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace asdlab
