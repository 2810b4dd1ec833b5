#include "tailrisk/oracle.hpp"

#include "affine_event.hpp"
#include "tailrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tailrisk::oracle {

namespace {

// Error carried out of nested integrals: since every integrand is
// nonnegative, a uniform relative bound on the inner values bounds the
// error of the outer integral by rel * outer value.
struct InnerError {
  double rel = 0.0;
  double abs = 0.0;  // from inner values that are exactly zero
  void add(const Exact& r) {
    if (r.value > 0.0) rel = std::max(rel, r.error / r.value);
    else abs = std::max(abs, r.error);
  }
  double bound(double outer) const { return rel * std::abs(outer) + abs; }
};

// Lower end of the logistic coordinate: 1 - u = e^-36 ~ 2.3e-16.
constexpr double kLowerT = -36.0;

double level(double t) { return 1.0 / (1.0 + std::exp(t)); }

// True when `a` has the heavier upper tail.
bool heavier(const TailLaw& a, const TailLaw& b) {
  const TailOrder oa = a.tail_order(), ob = b.tail_order();
  if (oa.light != ob.light) return ob.light;
  if (oa.light) return false;
  if (oa.alpha != ob.alpha) return oa.alpha < ob.alpha;
  return oa.log_power > ob.log_power;
}

// P(coef * prod(laws) > x) with all laws non-degenerate.
Exact product_recursive(std::vector<TailLaw> laws, double coef, double x, Tolerance tol, double floor) {
  if (laws.size() == 1) return {affine_exceed(laws.front(), 0.0, coef, x), 0.0};
  // Keep the heaviest factor innermost; integrate over the last of the rest.
  const auto heaviest = std::min_element(laws.begin(), laws.end(), [](const TailLaw& a, const TailLaw& b) { return heavier(a, b); });
  std::iter_swap(heaviest, laws.begin());
  const TailLaw outer = laws.back();
  laws.pop_back();
  const Tolerance inner{tol.abs * 0.1, tol.rel * 0.1};
  InnerError inner_err;
  const Exact e = expect(
      outer,
      [&](double v) {
        const Exact r = product_recursive(laws, coef * v, x, inner, floor);
        inner_err.add(r);
        return r.value;
      },
      tol, floor);
  return {e.value, e.error + inner_err.bound(e.value)};
}

}  // namespace

Exact expect(const TailLaw& law, const std::function<double(double)>& f, Tolerance tol, double mass_floor) {
  if (law.is_point_mass()) return {f(law.quantile(1.0)), 0.0};
  const double upper_t = std::log(1.0 / std::clamp(mass_floor, 1e-300, 1e-6));
  const auto integrand = [&](double t) {
    const double u = level(t);
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = f(law.quantile(u));
    return v * u * (1.0 - u);
  };
  std::vector<double> bp{kLowerT, -12.0, -4.0, 0.0, 4.0, 12.0, 24.0};
  for (double t = 40.0; t < upper_t; t += 16.0) bp.push_back(t);
  bp.push_back(upper_t);
  const Integral r = integrate(integrand, bp, tol);
  // Discarded mass: u < u(upper_t) where f <= 1, and 1 - u < e^-36 at the
  // lower end where f is evaluated at the boundary.
  const double lower_mass = 1.0 - level(kLowerT);
  const double trunc = level(upper_t) + lower_mass * std::abs(f(law.quantile(level(kLowerT))));
  return {r.value, r.error + trunc};
}

Exact product_tail(std::span<const TailLaw> laws, double x, Tolerance tol) {
  if (laws.empty()) throw DomainError("product_tail: need at least one law");
  if (laws.size() > 3) throw UnsupportedError("product_tail: oracle supports at most 3 factors; use the estimators");
  if (std::isnan(x)) throw DomainError("product_tail: x is NaN");
  double coef = 1.0;
  std::vector<TailLaw> random;
  for (const TailLaw& l : laws) {
    if (l.is_point_mass()) coef *= l.quantile(1.0);
    else random.push_back(l);
  }
  if (random.empty()) return {coef > x ? 1.0 : 0.0, 0.0};
  if (coef == 0.0) return {0.0 > x ? 1.0 : 0.0, 0.0};
  // Lower bound on the answer steers the truncation of the outer integrals.
  double floor = 1e-30;
  if (x > 1.0 && coef > 0.0 && std::all_of(random.begin(), random.end(), [](const TailLaw& l) { return l.is_positive(); })) {
    const double share = std::pow(x / coef, 1.0 / static_cast<double>(random.size()));
    double lb = 1.0;
    for (const TailLaw& l : random) lb *= l.survival(share);
    if (lb > 0.0) floor = std::min(floor, 1e-3 * std::max(tol.rel, 1e-16) * lb);
  }
  return product_recursive(random, coef, x, tol, floor);
}

Exact model_tail(const ModelSpec& spec, Which which, double x, Tolerance tol) {
  spec.validate();
  const std::size_t n = spec.n();
  if (n > 2) throw UnsupportedError("model_tail: oracle supports n <= 2; use the estimators");
  if (spec.x_dependence != Dependence::independent) throw UnsupportedError("model_tail: oracle requires independent X");
  if (std::isnan(x)) throw DomainError("model_tail: x is NaN");
  if (which == Which::M && x < 0.0) return {1.0, 0.0};

  using detail::Coord;
  std::vector<double> xs(n), ys(n);
  std::vector<Coord> random;
  auto law_of = [&](Coord c) -> const TailLaw& { return c.is_y ? spec.y_laws[c.i] : spec.x_laws[c.i]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (bool is_y : {false, true}) {
      const Coord c{is_y, i};
      if (law_of(c).is_point_mass()) (is_y ? ys : xs)[i] = law_of(c).quantile(1.0);
      else random.push_back(c);
    }
  }
  if (random.empty()) {
    const ShiftedValue v = shifted_value(xs, ys, 1, n);
    return {((which == Which::S ? v.s : v.m) > x) ? 1.0 : 0.0, 0.0};
  }
  // Innermost: the heaviest continuous coordinate, Y's preferred on ties.
  auto inner_it = std::min_element(random.begin(), random.end(), [&](Coord a, Coord b) {
    if (heavier(law_of(a), law_of(b))) return true;
    if (heavier(law_of(b), law_of(a))) return false;
    return a.is_y && !b.is_y;
  });
  const Coord inner = *inner_it;
  random.erase(inner_it);

  std::function<Exact(std::size_t, Tolerance)> nest = [&](std::size_t depth, Tolerance t) -> Exact {
    if (depth == random.size()) {
      return {detail::event_prob_given_others(law_of(inner), which, x, xs, ys, inner), 0.0};
    }
    const Coord c = random[depth];
    const Tolerance deeper{t.abs * 0.1, t.rel * 0.1};
    InnerError inner_err;
    const Exact e = expect(
        law_of(c),
        [&](double v) {
          (c.is_y ? ys : xs)[c.i] = v;
          const Exact r = nest(depth + 1, deeper);
          inner_err.add(r);
          return r.value;
        },
        t, 1e-30);
    return {e.value, e.error + inner_err.bound(e.value)};
  };
  return nest(0, tol);
}

}  // namespace tailrisk::oracle
