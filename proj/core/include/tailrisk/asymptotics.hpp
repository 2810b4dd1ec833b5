#pragma once

#include "tailrisk/distributions.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tailrisk {

struct Coefficient {
  double value = 0.0;
  double std_error = 0.0;  // zero for closed-form coefficients
};

// P(Y_1 ... Y_i > x)
struct ProductOfY {
  std::size_t i;
};
// P(X_i Y_1 ... Y_i > x)
struct XProduct {
  std::size_t i;
};
// P(Y_i > x)
struct PlainG {
  std::size_t i;
};
// P(Y_i Z > x) for an extra factor Z independent of Y_i.
struct YTimes {
  std::size_t i;
  TailLaw z;
};

using BaseTail = std::variant<ProductOfY, XProduct, PlainG, YTimes>;

std::string describe(const BaseTail& base);

struct Term {
  Coefficient coefficient;
  BaseTail base;
};

struct Expansion {
  std::vector<Term> terms;
};

// alpha^(n-1) prod Gamma(gamma_i) / Gamma(sum gamma_i), via log-Gamma with
// the gammas sorted so that the result is symmetric to the last bit.
double rootzen_coefficient(std::span<const double> gammas, double alpha);

// Asymptote of P(prod Z_i > x) for independent Pareto / LogPowerPareto
// factors with a common index: coefficient * prod l_i * (ln x)^(sum gamma_i - 1) * x^-alpha.
double product_tail_asymptote(std::span<const TailLaw> laws, double x);

// Same formula over {X_n, Y_1, ..., Y_n}.
double theorem1_tail(const ModelSpec& spec, double x);

// Asymptote of P(prod V_i > x) for any independent factors with at least
// one regularly varying one. Point masses scale x; factors lighter than the
// heaviest index contribute E V_+^alpha; heaviest factors with infinite
// alpha-moment combine through the Gamma formula, otherwise each in turn
// carries the tail while the others contribute their alpha-moments.
double base_tail_asymptote(std::span<const TailLaw> laws, double x);

// (E (sum c_i Z_i)_+^alpha - sum c_i E (Z_i)_+^alpha) P(Y > x) + sum c_i P(Y Z_i > x).
// The Y law is Y_1 of the spec the expansion is later evaluated against.
Expansion key_lemma_expansion(std::span<const double> c, std::span<const TailLaw> z, std::span<const double> moments,
                              double sum_moment);

enum class Variant { dependent_i, independent_ii };

std::string_view variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view name);

// Expansion of P(S_n > x) (or M_n) with coefficients estimated by paired
// differences. Checks the hypotheses of the chosen variant against the law
// catalogue and throws PreconditionError naming the first one that fails.
Expansion theorem2_expansion(const ModelSpec& spec, Which which, Variant variant, const MonteCarlo& mc);

struct IidConstants {
  Coefficient k;  // P(S_n > x) ~ K_n G(x)
  Coefficient l;  // P(M_n > x) ~ L_n G(x)
  double theta = 0.0;
  double alpha = 0.0;
  double ey_alpha = 1.0;  // E Y^alpha
};

// Constants of the iid case. theta defaults to lim F(x)/G(x) derived from
// the tail orders of the two laws.
IidConstants corollary1_constants(const TailLaw& x_law, const TailLaw& y_law, std::size_t n,
                                  std::optional<double> theta, const MonteCarlo& mc);

// Per-family certificate that ln Y is convolution equivalent with index
// alpha(Y). Holds for LogFactorPareto with beta > 1 and SuperHeavyLog.
bool log_convolution_equivalent(const TailLaw& y);

// sum_i A_{n,i} P(Y_1 ... Y_i > x) for P(sum_i c_i Y_1 ... Y_i > x).
Expansion weighted_sum_expansion(std::span<const TailLaw> y_laws, std::span<const double> weights, WeightBounds bounds,
                                 const MonteCarlo& mc);

// Weighted-sum tail constant for iid Y: P(sum c_i Y_1 ... Y_i > x) ~ C G(x).
Coefficient corollary2_constant(const TailLaw& y_law, std::span<const double> weights, const MonteCarlo& mc);

enum class BaseMethod { oracle, conditional_mc, asymptote, automatic };

std::string_view base_method_name(BaseMethod m) noexcept;
BaseMethod parse_base_method(std::string_view name);

// Laws whose product defines the base tail, in the order X, Y_1, ..., Y_i.
std::vector<TailLaw> base_laws(const BaseTail& base, const ModelSpec& spec);

struct Evaluation {
  double value = 0.0;
  double error = 0.0;  // quadrature bounds and standard errors, added linearly
  std::vector<double> term_values;
};

// sum coefficient * base tail at x. `automatic` uses the oracle for
// products of at most three laws and conditional Monte Carlo beyond.
Evaluation evaluate_expansion(const Expansion& expansion, const ModelSpec& spec, double x, BaseMethod method,
                              const MonteCarlo& mc = {});

}  // namespace tailrisk
