#pragma once

#include "tailrisk/distributions.hpp"
#include "tailrisk/model.hpp"

#include <cstddef>
#include <limits>
#include <span>

namespace tailrisk::detail {

// One random coordinate of a path: X_i or Y_i, 0-based index.
struct Coord {
  bool is_y;
  std::size_t i;
};

// P({S_n > x} or {M_n > x}, V > v_min | all coordinates except V), where V
// is coordinate `k` with law `law`. Every partial sum S_j is affine in V
// given the others, so the event is a union of at most two half-lines.
// The entry of x/y at k is ignored.
double event_prob_given_others(const TailLaw& law, Which which, double threshold, std::span<const double> x,
                               std::span<const double> y, Coord k,
                               double v_min = -std::numeric_limits<double>::infinity());

}  // namespace tailrisk::detail
