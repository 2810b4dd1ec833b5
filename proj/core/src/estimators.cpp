#include "tailrisk/estimators.hpp"

#include "accumulate.hpp"
#include "affine_event.hpp"
#include "parallel.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace tailrisk {

namespace {

constexpr std::size_t kMinTailSamples = 100;
constexpr double kTruncationLevel = 1e-4;

void check_tail_args(const ModelSpec& spec, const MonteCarlo& mc, const char* op) {
  spec.validate();
  if (mc.count < kMinTailSamples) throw DomainError(std::string(op) + ": count must be at least 100");
  if (spec.x_dependence == Dependence::custom && !spec.joint_sampler) {
    throw ConfigError("model.x_dependence", "custom dependence requires a joint sampler");
  }
}

double plus_power(double z, double alpha) {
  if (alpha == 0.0) return z > 0.0 ? 1.0 : 0.0;
  return z > 0.0 ? std::pow(z, alpha) : 0.0;
}

TailEstimate finish(double x, const detail::Moments& m, TailMethod method, const MonteCarlo& mc) {
  TailEstimate e;
  e.x = x;
  e.p_hat = std::clamp(m.mean, 0.0, 1.0);
  e.std_error = m.std_error();
  e.method = method;
  e.n_samples = m.n;
  e.seed = mc.seed;
  return e;
}

// Everything a per-path evaluation needs, allocated once per block.
struct PathScratch {
  std::vector<double> x, y, ux, uy;
  explicit PathScratch(std::size_t n) : x(n), y(n), ux(n), uy(n) {}
};

}  // namespace

std::string_view method_name(TailMethod m) noexcept {
  switch (m) {
    case TailMethod::crude: return "crude";
    case TailMethod::conditional: return "conditional";
    case TailMethod::asmussen_kroese: return "asmussen-kroese";
  }
  return "?";
}

TailMethod parse_method(std::string_view name) {
  if (name == "crude") return TailMethod::crude;
  if (name == "conditional") return TailMethod::conditional;
  if (name == "asmussen-kroese" || name == "ak") return TailMethod::asmussen_kroese;
  throw ConfigError("run.method", "unknown estimator '" + std::string(name) + "'");
}

std::string_view validity_name(VarianceValidity v) noexcept {
  return v == VarianceValidity::finite_variance_proven ? "finite-variance-proven" : "heavy-variance-warning";
}

TailEstimate crude_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc) {
  check_tail_args(spec, mc, "crude_tail");
  const std::size_t n = spec.n();
  const detail::Moments m = detail::block_moments(mc.count, mc.workers, [&] {
    return [&, s = PathScratch(n)](std::size_t k) mutable {
      Stream stream(mc.seed, k);
      draw_path(spec, stream, s.x, s.y);
      const ShiftedValue v = shifted_value(s.x, s.y, 1, n);
      return (which == Which::S ? v.s : v.m) > x ? 1.0 : 0.0;
    };
  });
  TailEstimate e = finish(x, m, TailMethod::crude, mc);
  // Binomial form; equal to the sample formula up to the n/(n-1) factor.
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(m.n));
  return e;
}

TailEstimate conditional_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc) {
  check_tail_args(spec, mc, "conditional_tail");
  if (!(x > 0.0)) return crude_tail(spec, which, x, mc);
  if (spec.y_laws.front().is_point_mass()) {
    throw PreconditionError("Y_1 absolutely continuous", "conditional estimator integrates Y_1 out");
  }
  const std::size_t n = spec.n();
  const TailLaw& g1 = spec.y_laws.front();
  const detail::Moments m = detail::block_moments(mc.count, mc.workers, [&] {
    return [&, s = PathScratch(n)](std::size_t k) mutable {
      Stream stream(mc.seed, k);
      draw_path(spec, stream, s.x, s.y);
      const ShiftedValue rest = shifted_value(s.x, s.y, 2, n - 1);
      const double t = s.x[0] + (which == Which::S ? rest.s : rest.m);
      return affine_exceed(g1, 0.0, t, x);
    };
  });
  return finish(x, m, TailMethod::conditional, mc);
}

TailEstimate asmussen_kroese_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc) {
  check_tail_args(spec, mc, "asmussen_kroese_tail");
  if (!(x > 0.0)) return crude_tail(spec, which, x, mc);
  const std::size_t n = spec.n();
  // X coordinates join the partition only when they are independent.
  std::vector<detail::Coord> coords;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.x_dependence == Dependence::independent && !spec.x_laws[i].is_point_mass()) coords.push_back({false, i});
    if (!spec.y_laws[i].is_point_mass()) coords.push_back({true, i});
  }
  if (coords.empty()) return crude_tail(spec, which, x, mc);
  auto law_of = [&](detail::Coord c) -> const TailLaw& { return c.is_y ? spec.y_laws[c.i] : spec.x_laws[c.i]; };

  const detail::Moments m = detail::block_moments(mc.count, mc.workers, [&] {
    return [&, s = PathScratch(n), levels = std::vector<double>(coords.size())](std::size_t k) mutable {
      Stream stream(mc.seed, k);
      draw_path(spec, stream, s.x, s.y, s.ux, s.uy);
      for (std::size_t c = 0; c < coords.size(); ++c) levels[c] = coords[c].is_y ? s.uy[coords[c].i] : s.ux[coords[c].i];
      double p = 0.0;
      for (std::size_t c = 0; c < coords.size(); ++c) {
        double others = 1.0;
        for (std::size_t d = 0; d < coords.size(); ++d) {
          if (d != c) others = std::min(others, levels[d]);
        }
        const TailLaw& law = law_of(coords[c]);
        const double v_min = others < 1.0 ? law.quantile(others) : -std::numeric_limits<double>::infinity();
        p += detail::event_prob_given_others(law, which, x, s.x, s.y, coords[c], v_min);
      }
      return p;
    };
  });
  return finish(x, m, TailMethod::asmussen_kroese, mc);
}

TailEstimate estimate_tail(const ModelSpec& spec, Which which, double x, TailMethod method, const MonteCarlo& mc) {
  switch (method) {
    case TailMethod::crude: return crude_tail(spec, which, x, mc);
    case TailMethod::conditional: return conditional_tail(spec, which, x, mc);
    case TailMethod::asmussen_kroese: return asmussen_kroese_tail(spec, which, x, mc);
  }
  throw DomainError("estimate_tail: unknown method");
}

MomentEstimate plus_moment(const PathFunctional& z, double alpha, const MonteCarlo& mc, double tail_index) {
  if (!(alpha >= 0.0)) throw DomainError("plus_moment: alpha must be >= 0");
  if (mc.count == 0) throw DomainError("plus_moment: count must be positive");
  const detail::Moments m = detail::block_moments(mc.count, mc.workers, [&] {
    return [&](std::size_t k) {
      Stream stream(mc.seed, k);
      return plus_power(z(stream), alpha);
    };
  });
  MomentEstimate e;
  e.value = m.mean;
  e.std_error = m.std_error();
  e.n_samples = m.n;
  e.seed = mc.seed;
  e.validity = alpha > 0.0 && tail_index <= 2.0 * alpha ? VarianceValidity::heavy_variance_warning
                                                       : VarianceValidity::finite_variance_proven;
  return e;
}

MomentEstimate paired_difference_sum(const ModelSpec& spec, std::span<const double> weights, double alpha,
                                     const MonteCarlo& mc, const PairedOptions& opt) {
  spec.validate();
  const std::size_t n = spec.n();
  if (weights.size() != n) throw DomainError("paired_difference_sum: need one weight per period");
  if (!(alpha >= 0.0)) throw DomainError("paired_difference_moment: alpha must be >= 0");
  if (mc.count == 0) throw DomainError("paired_difference_moment: count must be positive");
  if (spec.x_dependence == Dependence::custom && !spec.joint_sampler) {
    throw ConfigError("model.x_dependence", "custom dependence requires a joint sampler");
  }

  // One backward sweep gives every T_i = S^(i+1)_{n-i} of the path.
  auto difference = [&](PathScratch& s, std::size_t k) {
    Stream stream(mc.seed, k);
    draw_path(spec, stream, s.x, s.y);
    double t_s = 0.0, t_m = 0.0, total = 0.0;
    for (std::size_t i = n; i >= 1; --i) {
      const double xi = s.x[i - 1];
      const double t = opt.which == Which::S ? t_s : t_m;
      if (weights[i - 1] != 0.0) {
        double d = plus_power(xi + t, alpha) - plus_power(t, alpha);
        if (opt.subtract_x) d -= plus_power(xi, alpha);
        total += weights[i - 1] * d;
      }
      const double yi = s.y[i - 1];
      t_s = yi * (xi + t_s);
      t_m = yi * std::max(0.0, xi + t_m);
    }
    return total;
  };

  // The difference behaves like |X_i|^alpha for alpha <= 1 and like
  // alpha |X_i| T^(alpha-1) above; the latter has infinite variance once
  // alpha >= 2 since T is regularly varying with index alpha.
  double x_index = std::numeric_limits<double>::infinity();
  bool t_heavy = false;
  for (std::size_t i = 1; i <= n; ++i) {
    if (weights[i - 1] == 0.0) continue;
    const TailOrder xo = spec.x_laws[i - 1].abs_tail_order();
    if (!xo.light) x_index = std::min(x_index, xo.alpha);
    t_heavy = t_heavy || (alpha >= 2.0 && i < n);
  }
  const bool x_heavy = alpha <= 1.0 ? x_index <= 2.0 * alpha : x_index <= 2.0;

  MomentEstimate e;
  e.n_samples = mc.count;
  e.seed = mc.seed;
  e.validity = alpha > 0.0 && (x_heavy || t_heavy) ? VarianceValidity::heavy_variance_warning
                                                   : VarianceValidity::finite_variance_proven;

  if (!(opt.truncate || t_heavy)) {
    const detail::Moments m = detail::block_moments(mc.count, mc.workers, [&] {
      return [&, s = PathScratch(n)](std::size_t k) mutable { return difference(s, k); };
    });
    e.value = m.mean;
    e.std_error = m.std_error();
    return e;
  }

  std::vector<double> d(mc.count);
  detail::for_each_block(mc.count, mc.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    PathScratch s(n);
    for (std::size_t k = begin; k < end; ++k) d[k] = difference(s, k);
  });
  std::vector<double> mag(d.size());
  std::transform(d.begin(), d.end(), mag.begin(), [](double v) { return std::abs(v); });
  const auto rank = static_cast<std::size_t>(std::floor((1.0 - kTruncationLevel) * static_cast<double>(mag.size() - 1)));
  std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(rank), mag.end());
  const double q = mag[rank];
  detail::Moments m;
  for (double v : d) m.add(std::clamp(v, -q, q));
  e.value = m.mean;
  e.std_error = m.std_error();
  e.truncated = true;
  // |difference| has tail index kappa = alpha / (alpha - 1) when alpha > 1
  // (else that of |X_i|^alpha); the mean discarded beyond q is about
  // q * level / (kappa - 1).
  const double kappa = alpha > 1.0 ? alpha / (alpha - 1.0) : x_index / std::max(alpha, 1e-300);
  e.bias_bound = kappa > 1.0 ? q * kTruncationLevel / (kappa - 1.0) : std::numeric_limits<double>::infinity();
  return e;
}

MomentEstimate paired_difference_moment(const ModelSpec& spec, std::size_t i, double alpha, const MonteCarlo& mc,
                                        const PairedOptions& opt) {
  if (i < 1 || i > spec.n()) throw DomainError("paired_difference_moment: need 1 <= i <= n");
  std::vector<double> w(spec.n(), 0.0);
  w[i - 1] = 1.0;
  return paired_difference_sum(spec, w, alpha, mc, opt);
}

}  // namespace tailrisk
