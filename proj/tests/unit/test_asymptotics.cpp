#include "tailrisk/asymptotics.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tailrisk;

namespace {

const double e = std::exp(1.0);

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

template <class T>
bool holds(const BaseTail& b) {
  return std::holds_alternative<T>(b);
}

std::size_t index_of(const BaseTail& b) {
  return std::visit([](const auto& v) { return v.i; }, b);
}

}  // namespace

TEST(GammaCoefficient, Examples) {
  EXPECT_DOUBLE_EQ(rootzen_coefficient(std::vector<double>{2.0}, 3.7), 1.0);
  EXPECT_DOUBLE_EQ(rootzen_coefficient(std::vector<double>{1.0, 1.0}, 1.0), 1.0);
  EXPECT_NEAR(rootzen_coefficient(std::vector<double>{2.0, 2.0}, 2.0), 1.0 / 3.0, 1e-15);
  // 3^2 Gamma(0.5) Gamma(1) Gamma(2.5) / Gamma(4)
  const double expect = 9 * std::tgamma(0.5) * std::tgamma(2.5) / 6.0;
  EXPECT_NEAR(rootzen_coefficient(std::vector<double>{0.5, 1.0, 2.5}, 3.0) / expect, 1.0, 1e-13);
}

TEST(GammaCoefficient, PermutationSymmetric) {
  std::vector<double> g{0.7, 2.0, 1.3, 4.1};
  const double base = rootzen_coefficient(g, 1.5);
  std::sort(g.begin(), g.end());
  do {
    EXPECT_EQ(rootzen_coefficient(g, 1.5), base);
  } while (std::next_permutation(g.begin(), g.end()));
}

TEST(GammaCoefficient, DomainErrors) {
  EXPECT_THROW(rootzen_coefficient(std::vector<double>{1.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(rootzen_coefficient(std::vector<double>{1.0}, 0.0), DomainError);
  EXPECT_THROW(rootzen_coefficient(std::vector<double>{}, 1.0), DomainError);
}

TEST(ProductAsymptote, ParetoExamples) {
  const TailLaw p = TailLaw::pareto(1, 1);
  const double x = std::exp(20.0);
  EXPECT_NEAR(product_tail_asymptote(std::vector<TailLaw>{p}, x) / std::exp(-20.0), 1.0, 1e-13);
  const std::vector<TailLaw> two{p, p};
  EXPECT_NEAR(product_tail_asymptote(two, x) / (20 * std::exp(-20.0)), 1.0, 1e-13);
  for (double lx : {20.0, 40.0}) {
    const double ratio = oracle::product_tail(two, std::exp(lx)).value / product_tail_asymptote(two, std::exp(lx));
    EXPECT_NEAR(ratio, 1 + 1 / lx, 1e-7);
  }
}

TEST(ProductAsymptote, Preconditions) {
  const std::vector<TailLaw> mixed{TailLaw::pareto(1, 1), TailLaw::pareto(2, 1)};
  EXPECT_THROW(product_tail_asymptote(mixed, 100.0), DomainError);
  const std::vector<TailLaw> other{TailLaw::pareto(1, 1), TailLaw::lognormal(0, 1)};
  EXPECT_THROW(product_tail_asymptote(other, 100.0), DomainError);
  const std::vector<TailLaw> ok{TailLaw::pareto(1, 1)};
  EXPECT_THROW(product_tail_asymptote(ok, 0.5), DomainError);
}

TEST(LogPowerTail, SingleStepHandValue) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::pareto(2, 1), TailLaw::pareto(2, 1), 1);
  for (double x : {10.0, 1e4}) EXPECT_NEAR(theorem1_tail(spec, x) / (2 * std::log(x) / (x * x)), 1.0, 1e-13);
}

TEST(LogPowerTail, MatchesProductAsymptote) {
  const TailLaw xl = TailLaw::log_power_pareto(1.5, 2, e);
  const TailLaw y1 = TailLaw::log_power_pareto(1.5, 0.5, 2, 3);
  const TailLaw y2 = TailLaw::pareto(1.5, 2);
  ModelSpec spec;
  spec.x_laws = {TailLaw::pareto(1.5, 1), xl};
  spec.y_laws = {y1, y2};
  const std::vector<TailLaw> laws{xl, y1, y2};
  for (double x : {1e3, 1e9}) EXPECT_EQ(theorem1_tail(spec, x), product_tail_asymptote(laws, x));
  const ModelSpec one = ModelSpec::iid(xl, y1, 1);
  EXPECT_EQ(theorem1_tail(one, 50.0), product_tail_asymptote(std::vector<TailLaw>{xl, y1}, 50.0));
}

TEST(BaseAsymptote, LightFactorMomentAndPointMass) {
  // Light factor contributes its alpha-moment; point mass scales x.
  const TailLaw y = TailLaw::log_factor_pareto(1, 2, e);
  const TailLaw z = TailLaw::lognormal(0, 1);
  const double x = 1e5;
  const double v = base_tail_asymptote(std::vector<TailLaw>{TailLaw::point_mass(2), z, y}, x);
  EXPECT_NEAR(v / (std::exp(0.5) * y.survival(x / 2)), 1.0, 1e-12);
}

TEST(MaxSumExpansion, UnitFactor) {
  const std::vector<double> c{1.0};
  const std::vector<TailLaw> z{TailLaw::point_mass(1)};
  const Expansion ex = key_lemma_expansion(c, z, std::vector<double>{1.0}, 1.0);
  ASSERT_EQ(ex.terms.size(), 2u);
  EXPECT_TRUE(holds<PlainG>(ex.terms[0].base));
  EXPECT_EQ(ex.terms[0].coefficient.value, 0.0);
  EXPECT_TRUE(holds<YTimes>(ex.terms[1].base));
  EXPECT_EQ(ex.terms[1].coefficient.value, 1.0);
}

TEST(MaxSumExpansion, TwoUnitFactorsGiveDoubledTail) {
  const std::vector<double> c{1.0, 1.0};
  const std::vector<TailLaw> z{TailLaw::point_mass(1), TailLaw::point_mass(1)};
  const Expansion ex = key_lemma_expansion(c, z, std::vector<double>{1.0, 1.0}, 2.0);
  const ModelSpec spec = ModelSpec::iid(TailLaw::point_mass(1), TailLaw::pareto(1, 1), 1);
  for (double x : {10.0, 1e6}) {
    const Evaluation v = evaluate_expansion(ex, spec, x, BaseMethod::oracle);
    EXPECT_NEAR(v.value * x, 2.0, 1e-10);
  }
}

TEST(MaxSumExpansion, AllZeroWeightsRejected) {
  const std::vector<double> c{0.0, 0.0};
  const std::vector<TailLaw> z{TailLaw::point_mass(1), TailLaw::point_mass(1)};
  EXPECT_THROW(key_lemma_expansion(c, z, std::vector<double>{1.0, 1.0}, 2.0), DomainError);
}

TEST(ModelExpansion, AlphaZeroKeepsOnlyLastProduct) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::super_heavy_log(2, e), 3);
  const Expansion ex = theorem2_expansion(spec, Which::S, Variant::dependent_i, {20000, 1, 2});
  ASSERT_EQ(ex.terms.size(), 1u);
  EXPECT_TRUE(holds<XProduct>(ex.terms[0].base));
  EXPECT_EQ(index_of(ex.terms[0].base), 3u);
  EXPECT_EQ(ex.terms[0].coefficient.value, 1.0);
}

TEST(ModelExpansion, SingleStepVariantTwo) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::log_factor_pareto(1, 3, e), TailLaw::log_factor_pareto(1, 2, e), 1);
  const Expansion ex = theorem2_expansion(spec, Which::S, Variant::independent_ii, {20000, 1, 2});
  ASSERT_EQ(ex.terms.size(), 1u);
  EXPECT_TRUE(holds<XProduct>(ex.terms[0].base));
  EXPECT_EQ(ex.terms[0].coefficient.value, 1.0);
}

TEST(ModelExpansion, TermStructureAndLinearCoefficient) {
  // At alpha = 1 with positive X, B_{2,1} = E X_1 = e^(1/2).
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 2);
  const Expansion ex = theorem2_expansion(spec, Which::S, Variant::dependent_i, {400000, 3, 4});
  ASSERT_EQ(ex.terms.size(), 2u);
  EXPECT_TRUE(holds<ProductOfY>(ex.terms[0].base));
  EXPECT_EQ(index_of(ex.terms[0].base), 1u);
  EXPECT_TRUE(holds<XProduct>(ex.terms[1].base));
  EXPECT_EQ(index_of(ex.terms[1].base), 2u);
  const Coefficient b = ex.terms[0].coefficient;
  EXPECT_GT(b.std_error, 0.0);
  EXPECT_NEAR(b.value, std::exp(0.5), 3 * b.std_error);
}

TEST(ModelExpansion, Reproducible) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 3);
  const Expansion a = theorem2_expansion(spec, Which::M, Variant::dependent_i, {30000, 5, 1});
  const Expansion b = theorem2_expansion(spec, Which::M, Variant::dependent_i, {30000, 5, 4});
  ASSERT_EQ(a.terms.size(), b.terms.size());
  for (std::size_t k = 0; k < a.terms.size(); ++k) {
    EXPECT_EQ(a.terms[k].coefficient.value, b.terms[k].coefficient.value);
    EXPECT_EQ(a.terms[k].coefficient.std_error, b.terms[k].coefficient.std_error);
  }
}

TEST(ModelExpansion, PreconditionsNameHypothesis) {
  const MonteCarlo mc{1000, 1, 1};
  // X as heavy as Y: not negligible.
  const ModelSpec heavy_x = ModelSpec::iid(TailLaw::pareto(1, 1), TailLaw::log_factor_pareto(1, 2, e), 2);
  try {
    theorem2_expansion(heavy_x, Which::S, Variant::dependent_i, mc);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& err) {
    EXPECT_FALSE(err.hypothesis().empty());
  }
  // Variant ii needs X regularly varying with the common index.
  const ModelSpec light_x = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 2);
  EXPECT_THROW(theorem2_expansion(light_x, Which::S, Variant::independent_ii, mc), PreconditionError);
  // ... with a finite alpha-moment.
  EXPECT_THROW(theorem2_expansion(heavy_x, Which::S, Variant::independent_ii, mc), PreconditionError);
  // ... and independence.
  ModelSpec dep = ModelSpec::iid(TailLaw::log_factor_pareto(1, 3, e), TailLaw::log_factor_pareto(1, 2, e), 2);
  dep.x_dependence = Dependence::comonotone;
  EXPECT_THROW(theorem2_expansion(dep, Which::S, Variant::independent_ii, mc), PreconditionError);
  EXPECT_NO_THROW(theorem2_expansion(dep, Which::S, Variant::dependent_i, mc));
}

TEST(ModelExpansion, VariantsAgreeToLeadingOrder) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::log_factor_pareto(1, 3, e), TailLaw::log_factor_pareto(1, 2, e), 2);
  const MonteCarlo mc{100000, 7, 4};
  const Expansion one = theorem2_expansion(spec, Which::S, Variant::dependent_i, mc);
  const Expansion two = theorem2_expansion(spec, Which::S, Variant::independent_ii, mc);
  double prev = INFINITY;
  for (double x : {1e3, 1e5, 1e7, 1e9}) {
    const double a = evaluate_expansion(one, spec, x, BaseMethod::oracle).value;
    const double b = evaluate_expansion(two, spec, x, BaseMethod::oracle).value;
    const double rel = std::abs(a - b) / a;
    EXPECT_LT(rel, prev) << x;
    prev = rel;
  }
}

TEST(IidConstants, AlphaZero) {
  const IidConstants c =
      corollary1_constants(TailLaw::lognormal(0, 1), TailLaw::super_heavy_log(2, e), 3, std::nullopt, {10000, 1, 2});
  EXPECT_EQ(c.theta, 0.0);
  EXPECT_DOUBLE_EQ(c.k.value, 3.0);
  EXPECT_DOUBLE_EQ(c.l.value, 3.0);
  const IidConstants d =
      corollary1_constants(TailLaw::lognormal(0, 1), TailLaw::super_heavy_log(2, e), 3, 0.5, {10000, 1, 2});
  EXPECT_DOUBLE_EQ(d.k.value, 4.5);
}

TEST(IidConstants, SingleStepFactorizes) {
  const IidConstants c =
      corollary1_constants(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 1, 0.0, {400000, 2, 4});
  EXPECT_NEAR(c.k.value, std::exp(0.5), 3 * c.k.std_error);
  EXPECT_DOUBLE_EQ(c.ey_alpha, 2 * e);
}

TEST(IidConstants, LinearCaseClosedForm) {
  // alpha = 1, positive X: K_2 = E X (1 + 2 E Y).
  const IidConstants c =
      corollary1_constants(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 2, 0.0, {400000, 2, 4});
  EXPECT_NEAR(c.k.value, std::exp(0.5) * (1 + 4 * e), 3 * c.k.std_error);
}

TEST(IidConstants, MaxConstantDominates) {
  const TailLaw x = TailLaw::shifted(TailLaw::lognormal(0, 1), 1.0);
  const IidConstants c = corollary1_constants(x, TailLaw::log_factor_pareto(1, 2, e), 3, 0.0, {200000, 4, 4});
  EXPECT_GE(c.k.value, 0.0);
  EXPECT_GE(c.l.value, c.k.value - 3 * combined(c.k.std_error, c.l.std_error));
}

TEST(IidConstants, ThetaFromTailConstants) {
  // Both LogFactorPareto(1, 2, .): F/G -> x0_F ln^2 x0_F / (x0_G ln^2 x0_G).
  const TailLaw x = TailLaw::log_factor_pareto(1, 2, 4);
  const TailLaw y = TailLaw::log_factor_pareto(1, 2, e);
  const IidConstants c = corollary1_constants(x, y, 1, std::nullopt, {1000, 1, 1});
  EXPECT_NEAR(c.theta, 4 * std::pow(std::log(4.0), 2) / e, 1e-12);
}

TEST(IidConstants, InfiniteMomentRejected) {
  EXPECT_THROW(corollary1_constants(TailLaw::lognormal(0, 1), TailLaw::pareto(1, 1), 2, 0.0, {1000, 1, 1}),
               PreconditionError);
}

TEST(Certification, LogConvolutionEquivalence) {
  EXPECT_TRUE(log_convolution_equivalent(TailLaw::log_factor_pareto(1, 2, e)));
  EXPECT_TRUE(log_convolution_equivalent(TailLaw::super_heavy_log(2, e)));
  EXPECT_FALSE(log_convolution_equivalent(TailLaw::pareto(1, 1)));
  EXPECT_FALSE(log_convolution_equivalent(TailLaw::lognormal(0, 1)));
}

TEST(Weighted, SingleStepIsPowerOfWeight) {
  const std::vector<TailLaw> y{TailLaw::log_factor_pareto(1.5, 2, e)};
  const Expansion ex = weighted_sum_expansion(y, std::vector<double>{2.0}, {1.0, 3.0}, {20000, 1, 2});
  ASSERT_EQ(ex.terms.size(), 1u);
  EXPECT_NEAR(ex.terms[0].coefficient.value, std::pow(2.0, 1.5), 1e-12);
}

TEST(Weighted, LinearCaseIsWeights) {
  const std::vector<TailLaw> y(3, TailLaw::log_factor_pareto(1, 2, e));
  const std::vector<double> c{0.5, 1.5, 2.0};
  const Expansion ex = weighted_sum_expansion(y, c, {0.5, 2.0}, {20000, 1, 2});
  ASSERT_EQ(ex.terms.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(ex.terms[k].coefficient.value, c[k]);
    EXPECT_EQ(ex.terms[k].coefficient.std_error, 0.0);
    EXPECT_EQ(index_of(ex.terms[k].base), k + 1);
  }
}

TEST(Weighted, AlphaZeroSingleTerm) {
  const std::vector<TailLaw> y(3, TailLaw::super_heavy_log(2, e));
  const Expansion ex = weighted_sum_expansion(y, std::vector<double>{1.0, 1.0, 1.0}, {0.5, 2.0}, {20000, 1, 2});
  ASSERT_EQ(ex.terms.size(), 1u);
  EXPECT_TRUE(holds<ProductOfY>(ex.terms[0].base));
  EXPECT_EQ(index_of(ex.terms[0].base), 3u);
  EXPECT_EQ(ex.terms[0].coefficient.value, 1.0);
}

TEST(Weighted, Homogeneous) {
  const std::vector<TailLaw> y(2, TailLaw::log_factor_pareto(1.5, 2, e));
  const MonteCarlo mc{50000, 3, 4};
  const Expansion a = weighted_sum_expansion(y, std::vector<double>{1.0, 2.0}, {0.5, 4.0}, mc);
  const Expansion b = weighted_sum_expansion(y, std::vector<double>{2.0, 4.0}, {0.5, 4.0}, mc);
  ASSERT_EQ(a.terms.size(), b.terms.size());
  const double scale = std::pow(2.0, 1.5);
  for (std::size_t k = 0; k < a.terms.size(); ++k) {
    EXPECT_NEAR(b.terms[k].coefficient.value, scale * a.terms[k].coefficient.value,
                1e-10 * std::abs(b.terms[k].coefficient.value));
  }
}

TEST(Weighted, WeightOutsideBoundsRejected) {
  const std::vector<TailLaw> y(2, TailLaw::log_factor_pareto(1, 2, e));
  EXPECT_THROW(weighted_sum_expansion(y, std::vector<double>{1.0, 3.0}, {0.5, 2.0}, {}), DomainError);
}

TEST(WeightedConstant, Examples) {
  const TailLaw y = TailLaw::log_factor_pareto(1, 2, e);
  EXPECT_NEAR(corollary2_constant(y, std::vector<double>{1.0, 1.0}, {}).value, 1 + 4 * e, 1e-12);
  EXPECT_DOUBLE_EQ(corollary2_constant(y, std::vector<double>{1.7}, {}).value, 1.7);
  EXPECT_DOUBLE_EQ(corollary2_constant(TailLaw::super_heavy_log(2, e), std::vector<double>{1.0, 2.0, 3.0}, {}).value, 3.0);
}

TEST(Evaluate, PlainTail) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::point_mass(1), TailLaw::log_factor_pareto(1, 2, e), 2);
  const Expansion ex{{Term{{1.0, 0.0}, PlainG{1}}}};
  for (BaseMethod m : {BaseMethod::oracle, BaseMethod::asymptote, BaseMethod::automatic}) {
    EXPECT_NEAR(evaluate_expansion(ex, spec, 1e4, m).value, spec.y_laws[0].survival(1e4), 1e-15) << base_method_name(m);
  }
}

TEST(Evaluate, Linear) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 2);
  const Expansion ex{{Term{{1.5, 0.0}, ProductOfY{2}}, Term{{0.25, 0.0}, XProduct{1}}}};
  const Evaluation v = evaluate_expansion(ex, spec, 1e5, BaseMethod::oracle);
  ASSERT_EQ(v.term_values.size(), 2u);
  EXPECT_EQ(v.value, v.term_values[0] + v.term_values[1]);
  const double base = oracle::product_tail(base_laws(ProductOfY{2}, spec), 1e5).value;
  EXPECT_EQ(v.term_values[0], 1.5 * base);
  EXPECT_GT(v.error, 0.0);
}

TEST(Evaluate, AlphaZeroAsymptoteIsMultipleOfG) {
  const TailLaw y = TailLaw::super_heavy_log(2, e);
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), y, 3);
  const Expansion ex = theorem2_expansion(spec, Which::S, Variant::dependent_i, {10000, 1, 2});
  for (double x : {1e3, 1e8}) {
    EXPECT_NEAR(evaluate_expansion(ex, spec, x, BaseMethod::asymptote).value / (3 * y.survival(x)), 1.0, 1e-12);
  }
}

TEST(Evaluate, MonteCarloBaseMatchesOracle) {
  const ModelSpec spec = ModelSpec::iid(TailLaw::lognormal(0, 1), TailLaw::log_factor_pareto(1, 2, e), 2);
  const Expansion ex{{Term{{1.0, 0.0}, XProduct{2}}}};
  const Evaluation a = evaluate_expansion(ex, spec, 1e5, BaseMethod::oracle);
  const Evaluation b = evaluate_expansion(ex, spec, 1e5, BaseMethod::conditional_mc, {200000, 3, 4});
  EXPECT_NEAR(b.value, a.value, 3 * b.error);
}
