#include "tailrisk/quadrature.hpp"

#include "tailrisk/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace tailrisk {

namespace {

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double err = 0.0;
  const double r = GK::integrate([&](double t) { return f(mid + half * t); }, -1.0, 1.0, 0, 0.0, &err);
  return {a, b, half * r, half * err};
}

}  // namespace

Integral integrate(const std::function<double(double)>& f, std::span<const double> breakpoints, Tolerance tol,
                   std::size_t max_intervals) {
  if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) throw DomainError("integrate: breakpoints must be sorted");

  std::priority_queue<Piece> heap;
  Integral out;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] <= breakpoints[i]) continue;
    Piece p = rule(f, breakpoints[i], breakpoints[i + 1]);
    out.evaluations += 21;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  while (!heap.empty() && total_err > std::max(tol.abs, tol.rel * std::abs(total)) && heap.size() < max_intervals) {
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval at machine resolution
    heap.pop();
    Piece left = rule(f, worst.a, mid);
    Piece right = rule(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
  for (const Piece& p : pieces) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error = total_err;
  return out;
}

Integral integrate(const std::function<double(double)>& f, double a, double b, Tolerance tol, std::size_t max_intervals) {
  const double bp[2] = {a, b};
  return integrate(f, std::span<const double>(bp, 2), tol, max_intervals);
}

}  // namespace tailrisk
