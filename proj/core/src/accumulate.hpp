#pragma once

#include "parallel.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace tailrisk::detail {

// Welford accumulator; merge() is Chan's pairwise update.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    const double total = na + nb;
    mean += d * nb / total;
    m2 += o.m2 + d * d * na * nb / total;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

// Accumulates value(k) for k < count. `make` is called once per block and
// returns the per-path callable, so scratch buffers live in the callable.
// Blocks are merged in index order: the result is independent of workers.
template <class Make>
Moments block_moments(std::size_t count, unsigned workers, Make&& make) {
  std::vector<Moments> parts(block_count(count));
  for_each_block(count, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    auto value = make();
    Moments m;
    for (std::size_t k = begin; k < end; ++k) m.add(value(k));
    parts[b] = m;
  });
  Moments total;
  for (const Moments& m : parts) total.merge(m);
  return total;
}

}  // namespace tailrisk::detail
