#include "tailrisk/asymptotics.hpp"

#include "tailrisk/errors.hpp"
#include "tailrisk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
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

bool lemma_family(const TailLaw& l) {
  return l.family() == Family::Pareto || l.family() == Family::LogPowerPareto;
}

// Gamma formula over heavy factors sharing index alpha > 0; the tail of
// each is l_i (ln x)^(gamma_i - 1) x^-alpha.
double gamma_formula(std::span<const TailLaw> laws, double alpha, double x) {
  std::vector<double> gammas;
  double log_ell = 0.0;
  for (const TailLaw& l : laws) {
    gammas.push_back(l.tail_order().log_power + 1.0);
    log_ell += std::log(l.tail_constant());
  }
  const double g_sum = std::accumulate(gammas.begin(), gammas.end(), 0.0);
  const double lx = std::log(x);
  return rootzen_coefficient(gammas, alpha) * std::exp(log_ell + (g_sum - 1.0) * std::log(lx) - alpha * lx);
}

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_common_index(std::span<const TailLaw> y, double alpha) {
  for (std::size_t j = 0; j < y.size(); ++j) {
    const TailOrder o = y[j].tail_order();
    if (o.light || o.alpha != alpha) {
      throw PreconditionError("G_i regularly varying with a common index alpha",
                              "Y_" + std::to_string(j + 1) + " ~ " + y[j].describe() + " does not have index " + str(alpha));
    }
  }
}

void require_finite_y_moments(std::span<const TailLaw> y, double alpha, std::size_t from) {
  for (std::size_t j = from; j < y.size(); ++j) {
    if (!y[j].alpha_moment(alpha).finite) {
      throw PreconditionError("E Y_i^alpha < inf for i >= 2",
                              "E Y_" + std::to_string(j + 1) + "^" + str(alpha) + " diverges for " + y[j].describe());
    }
  }
}

double ipow(double base, std::size_t k) {
  double r = 1.0;
  for (std::size_t j = 0; j < k; ++j) r *= base;
  return r;
}

}  // namespace

std::string describe(const BaseTail& base) {
  return std::visit(Overloaded{
                        [](const ProductOfY& b) { return "ProductOfY(" + std::to_string(b.i) + ")"; },
                        [](const XProduct& b) { return "XProduct(" + std::to_string(b.i) + ")"; },
                        [](const PlainG& b) { return "PlainG(" + std::to_string(b.i) + ")"; },
                        [](const YTimes& b) { return "YTimes(" + std::to_string(b.i) + ", " + b.z.describe() + ")"; },
                    },
                    base);
}

double rootzen_coefficient(std::span<const double> gammas, double alpha) {
  if (gammas.empty()) throw DomainError("rootzen_coefficient: need at least one gamma");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("rootzen_coefficient: alpha must be positive");
  std::vector<double> g(gammas.begin(), gammas.end());
  for (double v : g) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("rootzen_coefficient: gammas must be positive");
  }
  std::sort(g.begin(), g.end());
  double log_num = 0.0, sum = 0.0;
  for (double v : g) {
    log_num += std::lgamma(v);
    sum += v;
  }
  const double n1 = static_cast<double>(g.size() - 1);
  return std::exp(n1 * std::log(alpha) + log_num - std::lgamma(sum));
}

double product_tail_asymptote(std::span<const TailLaw> laws, double x) {
  if (laws.empty()) throw DomainError("product_tail_asymptote: need at least one law");
  if (!(x > 1.0)) throw DomainError("product_tail_asymptote: x must exceed 1");
  const double alpha = laws.front().alpha();
  for (const TailLaw& l : laws) {
    if (!lemma_family(l)) {
      throw DomainError("product_tail_asymptote: " + l.describe() + " is not Pareto or LogPowerPareto");
    }
    if (l.alpha() != alpha) throw DomainError("product_tail_asymptote: factors must share the same alpha");
  }
  return gamma_formula(laws, alpha, x);
}

double theorem1_tail(const ModelSpec& spec, double x) {
  spec.validate();
  const std::size_t n = spec.n();
  for (const TailLaw& l : spec.x_laws) {
    if (!lemma_family(l)) throw DomainError("theorem1_tail: insurance laws must be Pareto or LogPowerPareto");
  }
  std::vector<TailLaw> laws{spec.x_laws[n - 1]};
  laws.insert(laws.end(), spec.y_laws.begin(), spec.y_laws.end());
  const double alpha = laws.front().alpha();
  for (const TailLaw& l : spec.x_laws) {
    if (l.alpha() != alpha) throw DomainError("theorem1_tail: all laws must share the same alpha");
  }
  return product_tail_asymptote(laws, x);
}

double base_tail_asymptote(std::span<const TailLaw> laws, double x) {
  if (laws.empty()) throw DomainError("base_tail_asymptote: need at least one law");
  double scale = 1.0;
  std::vector<TailLaw> random;
  for (const TailLaw& l : laws) {
    if (l.is_point_mass()) scale *= l.quantile(1.0);
    else random.push_back(l);
  }
  if (!(scale > 0.0)) throw UnsupportedError("base_tail_asymptote: non-positive constant factor");
  const double xs = x / scale;

  double alpha = kInf;
  for (const TailLaw& l : random) {
    if (!l.tail_order().light) alpha = std::min(alpha, l.tail_order().alpha);
  }
  if (!std::isfinite(alpha)) throw UnsupportedError("base_tail_asymptote: no regularly varying factor");

  double lighter = 1.0;
  std::vector<TailLaw> finite, infinite;
  for (const TailLaw& l : random) {
    const TailOrder o = l.tail_order();
    if (o.light || o.alpha > alpha) {
      lighter *= l.alpha_moment(alpha).value;
      continue;
    }
    (l.alpha_moment(alpha).finite ? finite : infinite).push_back(l);
  }

  if (!infinite.empty()) {
    for (const TailLaw& l : infinite) {
      if (!(alpha > 0.0) || !(l.tail_order().log_power > -1.0)) {
        throw UnsupportedError("base_tail_asymptote: no product formula for " + l.describe());
      }
    }
    double moments = 1.0;
    for (const TailLaw& l : finite) moments *= l.alpha_moment(alpha).value;
    if (!(xs > 1.0)) throw DomainError("base_tail_asymptote: x too small for the product formula");
    return lighter * moments * gamma_formula(infinite, alpha, xs);
  }

  std::vector<double> m(finite.size());
  for (std::size_t k = 0; k < finite.size(); ++k) m[k] = finite[k].alpha_moment(alpha).value;
  double total = 0.0;
  for (std::size_t k = 0; k < finite.size(); ++k) {
    double others = 1.0;
    for (std::size_t j = 0; j < finite.size(); ++j) {
      if (j != k) others *= m[j];
    }
    total += others * finite[k].survival(xs);
  }
  return lighter * total;
}

Expansion key_lemma_expansion(std::span<const double> c, std::span<const TailLaw> z, std::span<const double> moments,
                              double sum_moment) {
  if (c.empty() || c.size() != z.size() || c.size() != moments.size()) {
    throw DomainError("key_lemma_expansion: c, z and moments must have the same positive length");
  }
  if (!(*std::max_element(c.begin(), c.end()) > 0.0)) throw DomainError("key_lemma_expansion: need max c_i > 0");
  double weighted = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!std::isfinite(moments[i])) throw DomainError("key_lemma_expansion: moments must be finite");
    weighted += c[i] * moments[i];
  }
  if (!std::isfinite(sum_moment)) throw DomainError("key_lemma_expansion: moments must be finite");
  Expansion e;
  e.terms.push_back({{sum_moment - weighted, 0.0}, PlainG{1}});
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) e.terms.push_back({{c[i], 0.0}, YTimes{1, z[i]}});
  }
  return e;
}

std::string_view variant_name(Variant v) noexcept {
  return v == Variant::dependent_i ? "dependent-i" : "independent-ii";
}

Variant parse_variant(std::string_view name) {
  if (name == "dependent-i" || name == "i") return Variant::dependent_i;
  if (name == "independent-ii" || name == "ii") return Variant::independent_ii;
  throw ConfigError("run.variant", "unknown variant '" + std::string(name) + "'");
}

Expansion theorem2_expansion(const ModelSpec& spec, Which which, Variant variant, const MonteCarlo& mc) {
  spec.validate();
  const std::size_t n = spec.n();
  const TailOrder g1 = spec.y_laws.front().tail_order();
  if (g1.light) throw PreconditionError("G_i regularly varying with a common index alpha", "Y_1 is light tailed");
  const double alpha = g1.alpha;
  require_common_index(spec.y_laws, alpha);
  require_finite_y_moments(spec.y_laws, alpha, 1);

  const bool independent = spec.x_dependence == Dependence::independent;
  Expansion e;
  if (variant == Variant::dependent_i) {
    for (std::size_t i = 0; i < n; ++i) {
      // The condition compares X_i with G_{i+1}; the last period reuses G_n.
      const TailLaw& g_next = spec.y_laws[std::min(i + 1, n - 1)];
      const TailOrder f = independent ? spec.x_laws[i].tail_order() : spec.x_laws[i].abs_tail_order();
      if (!tail_negligible(f, g_next.tail_order())) {
        throw PreconditionError(independent ? "F_i(x) = o(G_{i+1}(x))" : "P(|X_i| > x) = o(G_{i+1}(x))",
                                "X_" + std::to_string(i + 1) + " ~ " + spec.x_laws[i].describe() +
                                    " is not negligible against " + g_next.describe());
      }
    }
    for (std::size_t i = 1; i < n; ++i) {
      const MomentEstimate b = paired_difference_moment(spec, i, alpha, mc, {which, false, false});
      // Exact zeros arise at alpha = 0 with positive risks and carry no term.
      if (b.value == 0.0 && b.std_error == 0.0) continue;
      e.terms.push_back({{b.value, b.std_error}, ProductOfY{i}});
    }
    e.terms.push_back({{1.0, 0.0}, XProduct{n}});
    return e;
  }

  if (!independent) throw PreconditionError("X_i independent", "variant ii needs independent insurance risks");
  for (std::size_t i = 0; i < n; ++i) {
    const TailLaw& f = spec.x_laws[i];
    const TailOrder o = f.tail_order();
    if (o.light || o.alpha != alpha) {
      throw PreconditionError("F_i regularly varying with index alpha",
                              "X_" + std::to_string(i + 1) + " ~ " + f.describe() + " does not have index " + str(alpha));
    }
    if (!f.alpha_moment(alpha).finite) {
      throw PreconditionError("E (X_i)_+^alpha < inf", "diverges for X_" + std::to_string(i + 1) + " ~ " + f.describe());
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const MomentEstimate b = paired_difference_moment(spec, i, alpha, mc, {which, true, false});
    e.terms.push_back({{b.value, b.std_error}, ProductOfY{i}});
  }
  for (std::size_t i = 1; i <= n; ++i) e.terms.push_back({{1.0, 0.0}, XProduct{i}});
  return e;
}

bool log_convolution_equivalent(const TailLaw& y) {
  if (const auto* p = std::get_if<LogFactorPareto>(&y.params())) return p->beta > 1.0;
  return y.family() == Family::SuperHeavyLog;
}

IidConstants corollary1_constants(const TailLaw& x_law, const TailLaw& y_law, std::size_t n,
                                  std::optional<double> theta, const MonteCarlo& mc) {
  if (n == 0) throw DomainError("corollary1_constants: n must be positive");
  if (!log_convolution_equivalent(y_law)) {
    throw PreconditionError("ln Y in S(alpha)", y_law.describe() + " is not certified");
  }
  IidConstants out;
  out.alpha = y_law.alpha();
  const Moment ey = y_law.alpha_moment(out.alpha);
  if (!ey.finite) throw PreconditionError("E Y^alpha < inf", "diverges for " + y_law.describe());
  out.ey_alpha = ey.value;

  if (theta) {
    if (!(*theta >= 0.0) || !std::isfinite(*theta)) throw DomainError("corollary1_constants: theta must be in [0, inf)");
    out.theta = *theta;
  } else {
    const TailOrder f = x_law.tail_order(), g = y_law.tail_order();
    if (tail_negligible(f, g)) out.theta = 0.0;
    else if (tail_comparable(f, g)) out.theta = x_law.tail_constant() / y_law.tail_constant();
    else throw PreconditionError("lim F(x)/G(x) = theta in [0, inf)", x_law.describe() + " is heavier than " + y_law.describe());
  }

  double theta_sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) theta_sum += ipow(out.ey_alpha, i);
  const double tail_part = out.theta * theta_sum;

  if (out.alpha == 0.0 && x_law.support_lower() > 0.0) {
    const double v = (out.theta + 1.0) * static_cast<double>(n);
    out.k = out.l = {v, 0.0};
    return out;
  }

  // sum_i E(S_{n-i+1})_+^a (EY^a)^(i-2) rearranges to
  // sum_i i (EY^a)^(i-1) E[(X_i + T_i)_+^a - (T_i)_+^a] with T_i = S^(i+1)_{n-i}.
  const ModelSpec spec = ModelSpec::iid(x_law, y_law, n);
  std::vector<double> w(n);
  for (std::size_t i = 1; i <= n; ++i) w[i - 1] = static_cast<double>(i) * ipow(out.ey_alpha, i - 1);
  const MomentEstimate ks = paired_difference_sum(spec, w, out.alpha, mc, {Which::S, false, false});
  const MomentEstimate ls = paired_difference_sum(spec, w, out.alpha, mc, {Which::M, false, false});
  out.k = {ks.value + tail_part, ks.std_error};
  out.l = {ls.value + tail_part, ls.std_error};
  return out;
}

Expansion weighted_sum_expansion(std::span<const TailLaw> y_laws, std::span<const double> weights, WeightBounds bounds,
                                 const MonteCarlo& mc) {
  const ModelSpec spec =
      ModelSpec::weighted(std::vector<TailLaw>(y_laws.begin(), y_laws.end()), std::vector<double>(weights.begin(), weights.end()), bounds);
  const std::size_t n = spec.n();
  const TailOrder g1 = y_laws.front().tail_order();
  if (g1.light) throw PreconditionError("G_1 regularly varying", "Y_1 is light tailed");
  const double alpha = g1.alpha;
  require_finite_y_moments(y_laws, alpha, 1);

  Expansion e;
  if (alpha == 0.0) {
    e.terms.push_back({{1.0, 0.0}, ProductOfY{n}});
    return e;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    Coefficient a{weights[i - 1], 0.0};
    if (i == n) {
      a.value = std::pow(weights[n - 1], alpha);
    } else if (alpha != 1.0) {
      const MomentEstimate m = paired_difference_moment(spec, i, alpha, mc);
      a = {m.value, m.std_error};
    }
    e.terms.push_back({a, ProductOfY{i}});
  }
  return e;
}

Coefficient corollary2_constant(const TailLaw& y_law, std::span<const double> weights, const MonteCarlo& mc) {
  if (weights.empty()) throw DomainError("corollary2_constant: need at least one weight");
  if (!log_convolution_equivalent(y_law)) {
    throw PreconditionError("ln Y in S(alpha)", y_law.describe() + " is not certified");
  }
  const double alpha = y_law.alpha();
  const Moment ey = y_law.alpha_moment(alpha);
  if (!ey.finite) throw PreconditionError("E Y^alpha < inf", "diverges for " + y_law.describe());
  const std::size_t n = weights.size();
  if (alpha == 0.0) return {static_cast<double>(n), 0.0};
  // sum_i E(sum_{k>=i} c_k Y_1..Y_{k-i+1})^a (EY^a)^(i-2) rearranges to
  // sum_i i (EY^a)^(i-1) A_{n,i}.
  std::vector<double> w(n);
  for (std::size_t i = 1; i <= n; ++i) w[i - 1] = static_cast<double>(i) * ipow(ey.value, i - 1);
  if (alpha == 1.0) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += w[i] * weights[i];
    return {c, 0.0};
  }
  const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
  const ModelSpec spec = ModelSpec::weighted(std::vector<TailLaw>(n, y_law), std::vector<double>(weights.begin(), weights.end()),
                                             {*lo, *hi});
  const MomentEstimate m = paired_difference_sum(spec, w, alpha, mc);
  return {m.value, m.std_error};
}

std::string_view base_method_name(BaseMethod m) noexcept {
  switch (m) {
    case BaseMethod::oracle: return "oracle";
    case BaseMethod::conditional_mc: return "conditional-mc";
    case BaseMethod::asymptote: return "asymptote";
    case BaseMethod::automatic: return "automatic";
  }
  return "?";
}

BaseMethod parse_base_method(std::string_view name) {
  if (name == "oracle") return BaseMethod::oracle;
  if (name == "conditional-mc" || name == "conditional") return BaseMethod::conditional_mc;
  if (name == "asymptote") return BaseMethod::asymptote;
  if (name == "automatic" || name == "auto") return BaseMethod::automatic;
  throw ConfigError("run.base", "unknown base method '" + std::string(name) + "'");
}

std::vector<TailLaw> base_laws(const BaseTail& base, const ModelSpec& spec) {
  const std::size_t n = spec.n();
  auto check = [n](std::size_t i) {
    if (i < 1 || i > n) throw DomainError("expansion: base index " + std::to_string(i) + " outside 1..n");
  };
  return std::visit(Overloaded{
                        [&](const ProductOfY& b) {
                          check(b.i);
                          return std::vector<TailLaw>(spec.y_laws.begin(), spec.y_laws.begin() + static_cast<std::ptrdiff_t>(b.i));
                        },
                        [&](const XProduct& b) {
                          check(b.i);
                          std::vector<TailLaw> v{spec.x_laws[b.i - 1]};
                          v.insert(v.end(), spec.y_laws.begin(), spec.y_laws.begin() + static_cast<std::ptrdiff_t>(b.i));
                          return v;
                        },
                        [&](const PlainG& b) {
                          check(b.i);
                          return std::vector<TailLaw>{spec.y_laws[b.i - 1]};
                        },
                        [&](const YTimes& b) {
                          check(b.i);
                          return std::vector<TailLaw>{b.z, spec.y_laws[b.i - 1]};
                        },
                    },
                    base);
}

namespace {

// P(V_0 V_1 ... V_m > x) with V_1.. positive, as the model tail of
// S_m = X_m Y_1 ... Y_m where earlier insurance risks vanish.
TailEstimate product_tail_mc(const std::vector<TailLaw>& laws, double x, const MonteCarlo& mc) {
  ModelSpec aux;
  std::size_t first_y = 0;
  TailLaw head = TailLaw::point_mass(1.0);
  if (!laws.front().is_positive() || laws.size() == 1) {
    head = laws.front();
    first_y = laws.size() == 1 ? 0 : 1;
  }
  if (laws.size() == 1) {
    aux.y_laws = {TailLaw::point_mass(1.0)};
    aux.x_laws = {head};
  } else {
    aux.y_laws.assign(laws.begin() + static_cast<std::ptrdiff_t>(first_y), laws.end());
    aux.x_laws.assign(aux.y_laws.size(), TailLaw::point_mass(0.0));
    aux.x_laws.back() = head;
  }
  return asmussen_kroese_tail(aux, Which::S, x, mc);
}

}  // namespace

Evaluation evaluate_expansion(const Expansion& expansion, const ModelSpec& spec, double x, BaseMethod method,
                              const MonteCarlo& mc) {
  if (expansion.terms.empty()) throw DomainError("evaluate_expansion: expansion has no terms");
  Evaluation out;
  for (const Term& t : expansion.terms) {
    const std::vector<TailLaw> laws = base_laws(t.base, spec);
    BaseMethod m = method;
    if (m == BaseMethod::automatic) m = laws.size() <= 3 ? BaseMethod::oracle : BaseMethod::conditional_mc;
    double base = 0.0, err = 0.0;
    switch (m) {
      case BaseMethod::oracle: {
        const oracle::Exact r = oracle::product_tail(laws, x);
        base = r.value;
        err = r.error;
        break;
      }
      case BaseMethod::conditional_mc: {
        const TailEstimate r = product_tail_mc(laws, x, mc);
        base = r.p_hat;
        err = r.std_error;
        break;
      }
      case BaseMethod::asymptote:
      case BaseMethod::automatic:
        base = base_tail_asymptote(laws, x);
        break;
    }
    const double v = t.coefficient.value * base;
    out.term_values.push_back(v);
    out.value += v;
    out.error += std::abs(t.coefficient.value) * err + t.coefficient.std_error * base;
  }
  return out;
}

}  // namespace tailrisk
