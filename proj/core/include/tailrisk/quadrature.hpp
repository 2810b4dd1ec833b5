#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tailrisk {

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-8;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error, truncation included
  std::size_t evaluations = 0;
};

// Globally adaptive Gauss-Kronrod (21 point) integration over the ordered
// breakpoints. Bisects the interval with the largest error estimate until
// the summed error is below max(tol.abs, tol.rel * |value|) or the interval
// budget is exhausted.
Integral integrate(const std::function<double(double)>& f, std::span<const double> breakpoints, Tolerance tol,
                   std::size_t max_intervals = 4000);

Integral integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol,
                   std::size_t max_intervals = 4000);

}  // namespace tailrisk
