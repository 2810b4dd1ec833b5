#include "tailrisk/distributions.hpp"

#include "tailrisk/errors.hpp"
#include "tailrisk/random.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace tailrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Solves g(z) = target for a strictly decreasing g on [lo, inf) by Newton
// steps safeguarded with bisection. Used for the log-scale quantiles.
template <class G, class DG>
double solve_decreasing(G g, DG dg, double target, double lo, double guess) {
  double a = lo;
  double b = std::max(guess, lo);
  // Grow the bracket until g(b) <= target.
  for (int i = 0; g(b) > target; ++i) {
    a = b;
    b = lo + 2.0 * (b - lo) + 1.0;
    if (i > 2000 || !std::isfinite(b)) return kInf;
  }
  double z = std::clamp(guess, a, b);
  for (int it = 0; it < 200; ++it) {
    const double f = g(z) - target;
    if (f == 0.0) return z;
    if (f > 0.0) a = z; else b = z;
    const double d = dg(z);
    double next = (d < 0.0) ? z - f / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z))) return next;
    z = next;
    if (b - a <= 1e-15 * std::max(1.0, std::abs(a))) return 0.5 * (a + b);
  }
  return z;
}

double lpp_log_survival(const LogPowerPareto& p, double z) {
  const double logpart = (p.gamma == 1.0) ? 0.0 : (p.gamma - 1.0) * std::log(z);
  return p.log_k + logpart - p.alpha * z;
}

double lfp_log_survival(const LogFactorPareto& p, double z) {
  const double z0 = std::log(p.x0);
  return p.beta * std::log(z0 / z) - p.alpha * (z - z0);
}

// x with P(V <= x) = p, accurate for small p where 1 - p would round.
double lower_quantile(const TailLaw& law, double p) {
  if (p >= 0.5) return law.quantile(1.0 - p);
  return std::visit(
      Overloaded{
          [p](const Pareto& q) { return q.x0 * std::exp(-std::log1p(-p) / q.alpha); },
          [p](const Lognormal& q) { return std::exp(q.mu - q.sigma * M_SQRT2 * boost::math::erfc_inv(2.0 * p)); },
          [p](const NegatedShifted& q) {
            return q.negate ? q.shift - q.base->quantile(p) : lower_quantile(*q.base, p) - q.shift;
          },
          [p, &law](const auto&) { return law.quantile(1.0 - p); },
      },
      law.params());
}

// p t + ln P(V > e^t), with the power parts combined so that large t
// does not cancel.
double log_moment_integrand(const TailLaw& law, double p, double t) {
  return std::visit(
      Overloaded{
          [=](const Pareto& q) {
            const double z0 = std::log(q.x0);
            return t <= z0 ? p * t : (p - q.alpha) * t + q.alpha * z0;
          },
          [=](const LogPowerPareto& q) {
            if (t <= std::log(q.lower)) return p * t;
            const double logpart = (q.gamma == 1.0) ? 0.0 : (q.gamma - 1.0) * std::log(t);
            return std::min(p * t, q.log_k + logpart + (p - q.alpha) * t);
          },
          [=](const LogFactorPareto& q) {
            const double z0 = std::log(q.x0);
            return t <= z0 ? p * t : q.beta * std::log(z0 / t) + (p - q.alpha) * t + q.alpha * z0;
          },
          [=, &law](const auto&) { return p * t + std::log(law.survival(std::exp(t))); },
      },
      law.params());
}

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::Pareto: return "Pareto";
    case Family::LogPowerPareto: return "LogPowerPareto";
    case Family::LogFactorPareto: return "LogFactorPareto";
    case Family::SuperHeavyLog: return "SuperHeavyLog";
    case Family::Lognormal: return "Lognormal";
    case Family::PointMass: return "PointMass";
    case Family::NegatedShifted: return "NegatedShifted";
  }
  return "?";
}

TailLaw TailLaw::pareto(double alpha, double x0) {
  require(alpha > 0.0 && std::isfinite(alpha), "Pareto: alpha must be positive");
  require(x0 > 0.0 && std::isfinite(x0), "Pareto: x0 must be positive");
  return TailLaw(Pareto{alpha, x0});
}

TailLaw TailLaw::log_power_pareto(double alpha, double gamma, double x0, double sv_scale) {
  require(alpha > 0.0 && std::isfinite(alpha), "LogPowerPareto: alpha must be positive");
  require(gamma > 0.0 && std::isfinite(gamma), "LogPowerPareto: gamma must be positive");
  require(x0 > 0.0 && std::isfinite(x0), "LogPowerPareto: x0 must be positive");
  // sv_scale < 1 would leave an atom at x1.
  require(sv_scale >= 1.0 && std::isfinite(sv_scale), "LogPowerPareto: sv_scale must be >= 1");
  LogPowerPareto p{alpha, gamma, x0, sv_scale, 0.0, 0.0, 0.0};
  const double z1 = std::max(std::log(x0), (gamma - 1.0) / alpha);
  require(z1 > 0.0 || gamma == 1.0, "LogPowerPareto: support must start above 1 when gamma != 1");
  p.x1 = std::exp(z1);
  p.log_k = std::log(sv_scale) + alpha * z1 + (gamma == 1.0 ? 0.0 : (1.0 - gamma) * std::log(z1));
  p.lower = p.x1;
  if (sv_scale > 1.0) {
    const auto g = [&](double z) { return lpp_log_survival(p, z); };
    const auto dg = [&](double z) { return (gamma == 1.0 ? 0.0 : (gamma - 1.0) / z) - alpha; };
    p.lower = std::exp(solve_decreasing(g, dg, 0.0, z1, z1 + std::log(sv_scale) / alpha));
  }
  return TailLaw(p);
}

TailLaw TailLaw::log_factor_pareto(double alpha, double beta, double x0) {
  require(alpha >= 0.0 && std::isfinite(alpha), "LogFactorPareto: alpha must be non-negative");
  require(beta > 1.0 && std::isfinite(beta), "LogFactorPareto: beta must exceed 1");
  require(x0 > 1.0 && std::isfinite(x0), "LogFactorPareto: x0 must exceed 1");
  return TailLaw(LogFactorPareto{alpha, beta, x0});
}

TailLaw TailLaw::super_heavy_log(double beta, double x0) {
  require(beta > 1.0 && std::isfinite(beta), "SuperHeavyLog: beta must exceed 1");
  require(x0 > 1.0 && std::isfinite(x0), "SuperHeavyLog: x0 must exceed 1");
  return TailLaw(SuperHeavyLog{beta, x0});
}

TailLaw TailLaw::lognormal(double mu, double sigma) {
  require(std::isfinite(mu), "Lognormal: mu must be finite");
  require(sigma > 0.0 && std::isfinite(sigma), "Lognormal: sigma must be positive");
  return TailLaw(Lognormal{mu, sigma});
}

TailLaw TailLaw::point_mass(double value) {
  require(std::isfinite(value), "PointMass: value must be finite");
  return TailLaw(PointMass{value});
}

TailLaw TailLaw::shifted(const TailLaw& base, double shift) {
  require(std::isfinite(shift), "NegatedShifted: shift must be finite");
  return TailLaw(NegatedShifted{std::make_shared<const TailLaw>(base), false, shift});
}

TailLaw TailLaw::negated(const TailLaw& base, double shift) {
  require(std::isfinite(shift), "NegatedShifted: shift must be finite");
  return TailLaw(NegatedShifted{std::make_shared<const TailLaw>(base), true, shift});
}

Family TailLaw::family() const noexcept { return static_cast<Family>(params_.index()); }

double TailLaw::survival(double x) const {
  if (std::isnan(x)) throw DomainError("survival: x is NaN");
  return std::visit(
      Overloaded{
          [x](const Pareto& p) { return x <= p.x0 ? 1.0 : std::exp(p.alpha * (std::log(p.x0) - std::log(x))); },
          [x](const LogPowerPareto& p) {
            if (x <= p.lower) return 1.0;
            if (x == kInf) return 0.0;
            return std::min(1.0, std::exp(lpp_log_survival(p, std::log(x))));
          },
          [x](const LogFactorPareto& p) {
            if (x <= p.x0) return 1.0;
            if (x == kInf) return 0.0;
            return std::exp(lfp_log_survival(p, std::log(x)));
          },
          [x](const SuperHeavyLog& p) {
            if (x <= p.x0) return 1.0;
            if (x == kInf) return 0.0;
            return std::pow(std::log(p.x0) / std::log(x), p.beta);
          },
          [x](const Lognormal& p) {
            if (x <= 0.0) return 1.0;
            return 0.5 * std::erfc((std::log(x) - p.mu) / (p.sigma * M_SQRT2));
          },
          [x](const PointMass& p) { return x < p.value ? 1.0 : 0.0; },
          [x](const NegatedShifted& p) {
            return p.negate ? p.base->cdf_left(p.shift - x) : p.base->survival(x + p.shift);
          },
      },
      params_);
}

double TailLaw::cdf(double x) const {
  if (const auto* ns = std::get_if<NegatedShifted>(&params_); ns && ns->negate) {
    return 1.0 - ns->base->cdf_left(ns->shift - x);
  }
  if (const auto* pm = std::get_if<PointMass>(&params_)) return x >= pm->value ? 1.0 : 0.0;
  if (const auto* ln = std::get_if<Lognormal>(&params_)) {
    if (x <= 0.0) return 0.0;
    return 0.5 * std::erfc(-(std::log(x) - ln->mu) / (ln->sigma * M_SQRT2));
  }
  return 1.0 - survival(x);
}

double TailLaw::cdf_left(double x) const {
  if (const auto* pm = std::get_if<PointMass>(&params_)) return x > pm->value ? 1.0 : 0.0;
  if (const auto* ns = std::get_if<NegatedShifted>(&params_)) {
    return ns->negate ? ns->base->survival(ns->shift - x) : ns->base->cdf_left(x + ns->shift);
  }
  return cdf(x);
}

double TailLaw::density(double x) const {
  return std::visit(
      Overloaded{
          [x](const Pareto& p) { return x < p.x0 ? 0.0 : p.alpha / x * std::exp(p.alpha * (std::log(p.x0) - std::log(x))); },
          [x](const LogPowerPareto& p) {
            if (x < p.lower || x == kInf) return 0.0;
            const double z = std::log(x);
            const double s = std::exp(lpp_log_survival(p, z));
            return s * (p.alpha - (p.gamma - 1.0) / z) / x;
          },
          [x](const LogFactorPareto& p) {
            if (x < p.x0 || x == kInf) return 0.0;
            const double z = std::log(x);
            return std::exp(lfp_log_survival(p, z)) * (p.beta / z + p.alpha) / x;
          },
          [x](const SuperHeavyLog& p) {
            if (x < p.x0 || x == kInf) return 0.0;
            const double z = std::log(x);
            return std::pow(std::log(p.x0) / z, p.beta) * p.beta / (z * x);
          },
          [x](const Lognormal& p) {
            if (x <= 0.0) return 0.0;
            const double t = (std::log(x) - p.mu) / p.sigma;
            return std::exp(-0.5 * t * t) / (x * p.sigma * std::sqrt(2.0 * M_PI));
          },
          [](const PointMass&) -> double { throw UnsupportedError("density: PointMass has no density"); },
          [x](const NegatedShifted& p) {
            return p.negate ? p.base->density(p.shift - x) : p.base->density(x + p.shift);
          },
      },
      params_);
}

double TailLaw::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile: survival level must lie in (0, 1]");
  return std::visit(
      Overloaded{
          [u](const Pareto& p) { return u == 1.0 ? p.x0 : p.x0 * std::exp(-std::log(u) / p.alpha); },
          [u](const LogPowerPareto& p) {
            if (u == 1.0) return p.lower;
            const auto g = [&](double z) { return lpp_log_survival(p, z); };
            const auto dg = [&](double z) { return (p.gamma == 1.0 ? 0.0 : (p.gamma - 1.0) / z) - p.alpha; };
            const double zl = std::log(p.lower);
            return std::exp(solve_decreasing(g, dg, std::log(u), zl, zl - std::log(u) / p.alpha));
          },
          [u](const LogFactorPareto& p) {
            if (u == 1.0) return p.x0;
            const double z0 = std::log(p.x0);
            const auto g = [&](double z) { return lfp_log_survival(p, z); };
            const auto dg = [&](double z) { return -p.beta / z - p.alpha; };
            const double guess = p.alpha > 0.0 ? z0 - std::log(u) / p.alpha : z0 * std::pow(u, -1.0 / p.beta);
            return std::exp(solve_decreasing(g, dg, std::log(u), z0, guess));
          },
          [u](const SuperHeavyLog& p) {
            if (u == 1.0) return p.x0;
            return std::exp(std::log(p.x0) * std::pow(u, -1.0 / p.beta));
          },
          [u](const Lognormal& p) {
            const double t = M_SQRT2 * boost::math::erfc_inv(2.0 * u);
            return std::exp(p.mu + p.sigma * t);
          },
          [](const PointMass& p) { return p.value; },
          [u, this](const NegatedShifted& p) {
            if (!p.negate) return p.base->quantile(u) - p.shift;
            if (u == 1.0) return support_lower();
            return p.shift - lower_quantile(*p.base, u);
          },
      },
      params_);
}

double TailLaw::sample(Stream& stream) const { return quantile(stream.uniform()); }

double TailLaw::alpha() const noexcept {
  const TailOrder o = tail_order();
  return o.light ? kInf : o.alpha;
}

TailOrder TailLaw::tail_order() const noexcept {
  return std::visit(
      Overloaded{
          [](const Pareto& p) { return TailOrder{false, p.alpha, 0.0}; },
          [](const LogPowerPareto& p) { return TailOrder{false, p.alpha, p.gamma - 1.0}; },
          [](const LogFactorPareto& p) { return TailOrder{false, p.alpha, -p.beta}; },
          [](const SuperHeavyLog& p) { return TailOrder{false, 0.0, -p.beta}; },
          [](const Lognormal&) { return TailOrder{true, 0.0, 0.0}; },
          [](const PointMass&) { return TailOrder{true, 0.0, 0.0}; },
          [](const NegatedShifted& p) {
            if (!p.negate) return p.base->tail_order();
            // shift - base is bounded above whenever base is bounded below.
            if (std::isfinite(p.base->support_lower())) return TailOrder{true, 0.0, 0.0};
            return p.base->abs_tail_order();
          },
      },
      params_);
}

TailOrder TailLaw::abs_tail_order() const noexcept {
  if (const auto* ns = std::get_if<NegatedShifted>(&params_)) return ns->base->abs_tail_order();
  return tail_order();
}

double TailLaw::tail_constant() const {
  return std::visit(
      Overloaded{
          [](const Pareto& p) { return std::pow(p.x0, p.alpha); },
          [](const LogPowerPareto& p) { return std::exp(p.log_k); },
          [](const LogFactorPareto& p) { return std::pow(p.x0, p.alpha) * std::pow(std::log(p.x0), p.beta); },
          [](const SuperHeavyLog& p) { return std::pow(std::log(p.x0), p.beta); },
          [](const Lognormal&) -> double { throw UnsupportedError("tail_constant: Lognormal tail is not regularly varying"); },
          [](const PointMass&) -> double { throw UnsupportedError("tail_constant: PointMass has no tail"); },
          [](const NegatedShifted& p) -> double {
            if (p.negate) throw UnsupportedError("tail_constant: negated law has a bounded upper tail");
            return p.base->tail_constant();
          },
      },
      params_);
}

double TailLaw::support_lower() const noexcept {
  return std::visit(Overloaded{
                        [](const Pareto& p) { return p.x0; },
                        [](const LogPowerPareto& p) { return p.lower; },
                        [](const LogFactorPareto& p) { return p.x0; },
                        [](const SuperHeavyLog& p) { return p.x0; },
                        [](const Lognormal&) { return 0.0; },
                        [](const PointMass& p) { return p.value; },
                        [](const NegatedShifted& p) {
                          return p.negate ? p.shift - p.base->support_upper() : p.base->support_lower() - p.shift;
                        },
                    },
                    params_);
}

double TailLaw::support_upper() const noexcept {
  return std::visit(Overloaded{
                        [](const PointMass& p) { return p.value; },
                        [](const NegatedShifted& p) {
                          return p.negate ? p.shift - p.base->support_lower() : p.base->support_upper() - p.shift;
                        },
                        [](const auto&) { return kInf; },
                    },
                    params_);
}

Moment TailLaw::alpha_moment(double p) const {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("alpha_moment: p must be a finite non-negative number");
  if (p == 0.0) {
    if (const auto* pm = std::get_if<PointMass>(&params_)) return {pm->value > 0.0 ? 1.0 : 0.0, true};
    return {survival(0.0), true};
  }
  return std::visit(
      Overloaded{
          [p](const Pareto& d) -> Moment {
            if (p >= d.alpha) return {kInf, false};
            return {std::pow(d.x0, p) * d.alpha / (d.alpha - p), true};
          },
          [p, this](const LogPowerPareto& d) -> Moment {
            if (p >= d.alpha) return {kInf, false};
            return alpha_moment_quadrature(p);
          },
          [p, this](const LogFactorPareto& d) -> Moment {
            if (p > d.alpha) return {kInf, false};
            if (p == d.alpha) return {std::pow(d.x0, d.alpha) * (1.0 + d.alpha * std::log(d.x0) / (d.beta - 1.0)), true};
            return alpha_moment_quadrature(p);
          },
          [](const SuperHeavyLog&) -> Moment { return {kInf, false}; },
          [p](const Lognormal& d) -> Moment { return {std::exp(p * d.mu + 0.5 * p * p * d.sigma * d.sigma), true}; },
          [p](const PointMass& d) -> Moment { return {d.value > 0.0 ? std::pow(d.value, p) : 0.0, true}; },
          [p, this](const NegatedShifted&) -> Moment { return alpha_moment_quadrature(p); },
      },
      params_);
}

Moment TailLaw::alpha_moment_quadrature(double p) const {
  if (!(p >= 0.0)) throw DomainError("alpha_moment: p must be non-negative");
  if (p == 0.0) return alpha_moment(0.0);
  if (is_point_mass()) return alpha_moment(p);
  const TailOrder o = tail_order();
  if (!o.light && (p > o.alpha || (p == o.alpha && o.log_power >= -1.0))) return {kInf, false};

  // E V_+^p = int_0^inf p v^(p-1) P(V > v) dv, in t = ln v.
  const double lo = support_lower();
  const double hi = support_upper();
  if (hi <= 0.0) return {0.0, true};
  const auto integrand = [&](double t) {
    if (!std::isfinite(t) || (hi < kInf && std::exp(t) >= hi)) return 0.0;
    return p * std::exp(log_moment_integrand(*this, p, t));
  };
  boost::math::quadrature::exp_sinh<double> right;
  double total = 0.0;
  double t_split = 0.0;
  if (lo > 0.0) {
    total += std::pow(lo, p);  // survival == 1 on (0, lo)
    t_split = std::log(lo);
  } else {
    // Left piece: t in (-inf, 0], mirrored onto [0, inf).
    total += right.integrate([&](double s) { return integrand(-s); }, 0.0, kInf, 1e-12);
  }
  // t = t_split + e^r - 1 turns algebraic decay in t into exponential decay in r.
  total += right.integrate(
      [&](double r) {
        const double f = integrand(t_split + std::expm1(r));
        return f == 0.0 ? 0.0 : f * std::exp(r);
      },
      0.0, kInf, 1e-12);
  return {total, std::isfinite(total)};
}

std::string TailLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Pareto& p) { os << "Pareto(alpha=" << p.alpha << ", x0=" << p.x0 << ")"; },
                 [&](const LogPowerPareto& p) {
                   os << "LogPowerPareto(alpha=" << p.alpha << ", gamma=" << p.gamma << ", x0=" << p.x0
                      << ", sv_scale=" << p.sv_scale << ")";
                 },
                 [&](const LogFactorPareto& p) {
                   os << "LogFactorPareto(alpha=" << p.alpha << ", beta=" << p.beta << ", x0=" << p.x0 << ")";
                 },
                 [&](const SuperHeavyLog& p) { os << "SuperHeavyLog(beta=" << p.beta << ", x0=" << p.x0 << ")"; },
                 [&](const Lognormal& p) { os << "Lognormal(mu=" << p.mu << ", sigma=" << p.sigma << ")"; },
                 [&](const PointMass& p) { os << "PointMass(" << p.value << ")"; },
                 [&](const NegatedShifted& p) {
                   if (p.negate) os << p.shift << " - " << p.base->describe();
                   else os << p.base->describe() << " - " << p.shift;
                 },
             },
             params_);
  return os.str();
}

double affine_exceed(const TailLaw& law, double a, double b, double x) {
  if (b > 0.0) return law.survival((x - a) / b);
  if (b < 0.0) return law.cdf_left((x - a) / b);
  return a > x ? 1.0 : 0.0;
}

bool tail_negligible(const TailOrder& f, const TailOrder& g) noexcept {
  if (g.light) return false;
  if (f.light) return true;
  if (f.alpha != g.alpha) return f.alpha > g.alpha;
  return f.log_power < g.log_power;
}

bool tail_comparable(const TailOrder& f, const TailOrder& g) noexcept {
  return !f.light && !g.light && f.alpha == g.alpha && f.log_power == g.log_power;
}

}  // namespace tailrisk
