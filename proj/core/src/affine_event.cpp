#include "affine_event.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tailrisk::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// P(a < V < b) for a < b, choosing the tail that avoids cancellation.
double interval_prob(const TailLaw& law, double a, double b) {
  if (!(b > a)) return 0.0;
  const double sa = law.survival(a);
  if (sa < 0.5) return std::max(0.0, sa - (1.0 - law.cdf_left(b)));
  return std::max(0.0, law.cdf_left(b) - law.cdf(a));
}

}  // namespace

double event_prob_given_others(const TailLaw& law, Which which, double threshold, std::span<const double> x,
                               std::span<const double> y, Coord k, double v_min) {
  const std::size_t n = y.size();
  if (which == Which::M && threshold < 0.0) return law.survival(v_min);

  // Complement of the event as an interval [lo, hi] in V.
  double lo = -kInf, hi = kInf;
  bool certain = false;
  auto constrain = [&](double a, double b) {
    // a + b V <= threshold
    if (b > 0.0) hi = std::min(hi, (threshold - a) / b);
    else if (b < 0.0) lo = std::max(lo, (threshold - a) / b);
    else if (a > threshold) certain = true;
  };

  double a_sum = 0.0;  // part of S_j not involving V
  double b_sum = 0.0;  // coefficient of V in S_j
  double prod = 1.0;   // prod_{l<=j} Y_l, with Y_k omitted when V = Y_k
  for (std::size_t j = 0; j < n; ++j) {
    if (!(k.is_y && k.i == j)) prod *= y[j];
    if (k.is_y) {
      const double term = x[j] * prod;
      if (j >= k.i) b_sum += term; else a_sum += term;
    } else if (j == k.i) {
      b_sum = prod;
    } else {
      a_sum += x[j] * prod;
    }
    if (which == Which::M || j + 1 == n) constrain(a_sum, b_sum);
  }

  if (certain || lo > hi) return law.survival(v_min);
  double p = law.survival(std::max(v_min, hi));
  if (lo > v_min) p += interval_prob(law, v_min, lo);
  return std::min(1.0, p);
}

}  // namespace tailrisk::detail
