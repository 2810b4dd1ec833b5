#include "tailrisk/distributions.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/quadrature.hpp"
#include "tailrisk/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace tailrisk;

namespace {

const double e = std::exp(1.0);

std::vector<TailLaw> continuous_laws() {
  return {
      TailLaw::pareto(2, 1),
      TailLaw::pareto(0.5, 3),
      TailLaw::log_power_pareto(2, 2, e),
      TailLaw::log_power_pareto(1, 1, 1),
      TailLaw::log_power_pareto(1.5, 0.5, 2, 3),
      TailLaw::log_factor_pareto(1, 2, e),
      TailLaw::log_factor_pareto(2.5, 1.5, 4),
      TailLaw::super_heavy_log(2, e),
      TailLaw::lognormal(0, 1),
      TailLaw::lognormal(1.5, 0.3),
      TailLaw::shifted(TailLaw::pareto(1.5, 1), 2),
      TailLaw::negated(TailLaw::lognormal(0, 1), 1),
  };
}

std::vector<TailLaw> heavy_laws() {
  return {TailLaw::pareto(2, 1), TailLaw::log_power_pareto(2, 2, e), TailLaw::log_power_pareto(1.5, 0.5, 2, 3),
          TailLaw::log_factor_pareto(1, 2, e), TailLaw::log_factor_pareto(2.5, 1.5, 4), TailLaw::super_heavy_log(2, e)};
}

}  // namespace

TEST(Survival, ParetoExample) { EXPECT_DOUBLE_EQ(TailLaw::pareto(2, 1).survival(2), 0.25); }

TEST(Survival, OneAtSupportEndpoint) {
  for (const TailLaw& l : heavy_laws()) EXPECT_DOUBLE_EQ(l.survival(l.support_lower()), 1.0) << l.describe();
  EXPECT_DOUBLE_EQ(TailLaw::pareto(1, 5).survival(-3), 1.0);
}

TEST(Survival, LogFactorParetoExample) {
  EXPECT_NEAR(TailLaw::log_factor_pareto(1, 2, e).survival(e * e), 0.25 / e, 1e-15);
}

TEST(Survival, ZeroAtInfinity) {
  for (const TailLaw& l : continuous_laws()) EXPECT_EQ(l.survival(INFINITY), 0.0) << l.describe();
}

TEST(Survival, NonIncreasing) {
  for (const TailLaw& l : continuous_laws()) {
    double prev = 1.0;
    for (double t = -5; t < 60; t += 0.37) {
      const double s = l.survival(std::exp(t)) ;
      ASSERT_LE(s, prev) << l.describe() << " at e^" << t;
      ASSERT_GE(s, 0.0);
      prev = s;
    }
  }
}

TEST(Survival, PointMassIsRightContinuous) {
  const TailLaw pm = TailLaw::point_mass(3);
  EXPECT_EQ(pm.survival(3), 0.0);
  EXPECT_EQ(pm.survival(2.999), 1.0);
  EXPECT_EQ(pm.cdf_left(3), 0.0);
  EXPECT_EQ(pm.cdf(3), 1.0);
}

TEST(Survival, NegatedShifted) {
  const TailLaw base = TailLaw::pareto(2, 1);
  const TailLaw s = TailLaw::shifted(base, 2);   // base - 2
  const TailLaw ng = TailLaw::negated(base, 2);  // 2 - base
  EXPECT_DOUBLE_EQ(s.survival(0), base.survival(2));
  EXPECT_DOUBLE_EQ(ng.survival(0), base.cdf_left(2));
  EXPECT_DOUBLE_EQ(ng.support_upper(), 1.0);
  EXPECT_TRUE(ng.tail_order().light);
}

TEST(Density, ParetoExample) { EXPECT_DOUBLE_EQ(TailLaw::pareto(2, 1).density(2), 0.25); }

TEST(Density, ZeroOutsideSupport) {
  for (const TailLaw& l : heavy_laws()) EXPECT_EQ(l.density(l.support_lower() * 0.5), 0.0) << l.describe();
}

TEST(Density, MatchesFiniteDifference) {
  const TailLaw l = TailLaw::log_factor_pareto(1, 2, e);
  const double x = e * e, h = 1e-5 * x;
  const double fd = (l.survival(x - h) - l.survival(x + h)) / (2 * h);
  EXPECT_NEAR(l.density(x) / fd, 1.0, 1e-6);
}

TEST(Density, PointMassUnsupported) { EXPECT_THROW(TailLaw::point_mass(1).density(1), UnsupportedError); }

TEST(Density, IntegratesToOne) {
  for (const TailLaw& l : continuous_laws()) {
    // Integrate over the survival scale's natural variable v = e^t on
    // [lower, cut] and compare with the exact mass there.
    const double lo = l.support_lower();
    double cut = l.quantile(1e-6);
    // Super-heavy quantiles overflow at small levels.
    if (!std::isfinite(cut)) cut = l.quantile(1e-2);
    const double a = std::isfinite(lo) ? lo : l.quantile(1 - 1e-15);
    std::vector<double> bp;
    const int pieces = 64;
    for (int k = 0; k <= pieces; ++k) bp.push_back(a + (cut - a) * std::pow(static_cast<double>(k) / pieces, 3.0));
    const Integral r = integrate([&](double v) { return l.density(v); }, bp, {0.0, 1e-11});
    const double mass = l.cdf(cut) - (std::isfinite(lo) ? 0.0 : l.cdf(a));
    EXPECT_NEAR(r.value, mass, 1e-8) << l.describe();
  }
}

TEST(Quantile, Examples) {
  EXPECT_DOUBLE_EQ(TailLaw::pareto(2, 1).quantile(0.25), 2.0);
  for (const TailLaw& l : heavy_laws()) EXPECT_DOUBLE_EQ(l.quantile(1.0), l.support_lower()) << l.describe();
  const TailLaw lpp = TailLaw::log_power_pareto(2, 2, e, 1);
  const double x = lpp.quantile(1e-6);
  EXPECT_NEAR(lpp.survival(x) / 1e-6, 1.0, 1e-12);
}

TEST(Quantile, DomainErrors) {
  const TailLaw l = TailLaw::pareto(1, 1);
  EXPECT_THROW(l.quantile(0.0), DomainError);
  EXPECT_THROW(l.quantile(-0.1), DomainError);
  EXPECT_THROW(l.quantile(1.5), DomainError);
}

TEST(Quantile, RoundTripOnLogGrid) {
  for (const TailLaw& l : continuous_laws()) {
    // Near survival level 1 the round trip loses digits to 1 - u.
    const double lo = std::max(l.quantile(1 - 1e-6), l.support_lower());
    const double hi = std::min(l.quantile(1e-14), 1e300);
    const double a = lo > 0 ? std::log(lo) : -10.0;
    const double b = std::log(std::max(hi, std::exp(a) * 10));
    for (int k = 1; k < 100; ++k) {
      const double x = std::exp(a + (b - a) * k / 100.0);
      const double u = l.survival(x);
      if (!(u > 0.0 && u < 1.0)) continue;
      EXPECT_NEAR(l.quantile(u) / x, 1.0, 1e-9) << l.describe() << " x=" << x;
    }
  }
}

TEST(Quantile, SurvivalOfQuantile) {
  for (const TailLaw& l : continuous_laws()) {
    for (double u : {0.9, 0.5, 1e-2, 1e-5, 1e-9, 1e-13}) {
      if (!std::isfinite(l.quantile(u))) continue;  // overflow for super-heavy laws
      EXPECT_NEAR(l.survival(l.quantile(u)) / u, 1.0, 1e-9) << l.describe() << " u=" << u;
    }
  }
}

TEST(Sample, PointMassConstant) {
  Stream s(1, 0);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(TailLaw::point_mass(3).sample(s), 3.0);
}

TEST(Sample, ParetoFromUniform) { EXPECT_DOUBLE_EQ(TailLaw::pareto(1, 1).from_uniform(0.5), 2.0); }

TEST(Sample, KolmogorovSmirnov) {
  const int n = 100000;
  const double crit = 1.63 / std::sqrt(static_cast<double>(n));  // 1% level
  for (const TailLaw& l : continuous_laws()) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
      Stream s(77, static_cast<std::uint64_t>(k));
      v[k] = l.sample(s);
    }
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (int k = 0; k < n; ++k) {
      const double f = l.cdf(v[k]);
      d = std::max({d, f - static_cast<double>(k) / n, static_cast<double>(k + 1) / n - f});
    }
    EXPECT_LT(d, crit) << l.describe();
  }
}

TEST(Sample, LogFactorParetoMean) {
  const TailLaw l = TailLaw::log_factor_pareto(1, 2, e);
  const int n = 1000000;
  double sum = 0, sq = 0;
  for (int k = 0; k < n; ++k) {
    Stream s(2024, static_cast<std::uint64_t>(k));
    const double v = l.sample(s);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 2 * e, 3 * se);
}

TEST(AlphaMoment, Examples) {
  EXPECT_DOUBLE_EQ(TailLaw::pareto(2, 1).alpha_moment(1).value, 2.0);
  EXPECT_FALSE(TailLaw::pareto(2, 1).alpha_moment(2).finite);
  const Moment m = TailLaw::log_factor_pareto(1, 2, e).alpha_moment(1);
  EXPECT_TRUE(m.finite);
  EXPECT_NEAR(m.value, 2 * e, 1e-14);
}

TEST(AlphaMoment, ZeroOrderIsPositiveMass) {
  EXPECT_EQ(TailLaw::pareto(2, 1).alpha_moment(0).value, 1.0);
  EXPECT_EQ(TailLaw::point_mass(-1).alpha_moment(0).value, 0.0);
  const TailLaw x = TailLaw::shifted(TailLaw::pareto(1, 1), 2);
  EXPECT_DOUBLE_EQ(x.alpha_moment(0).value, 0.5);
}

TEST(AlphaMoment, ClosedFormMatchesQuadrature) {
  struct Case {
    TailLaw law;
    double p;
  };
  const std::vector<Case> cases{
      {TailLaw::pareto(2, 1), 1.0},          {TailLaw::pareto(3, 2), 2.5},
      {TailLaw::log_factor_pareto(1, 2, e), 1.0}, {TailLaw::log_factor_pareto(1.5, 3, 2), 1.5},
      {TailLaw::lognormal(0, 1), 1.0},       {TailLaw::lognormal(0.5, 0.7), 2.0},
      {TailLaw::point_mass(2), 1.5},
  };
  for (const Case& c : cases) {
    const Moment a = c.law.alpha_moment(c.p);
    const Moment b = c.law.alpha_moment_quadrature(c.p);
    ASSERT_TRUE(a.finite && b.finite) << c.law.describe();
    EXPECT_NEAR(b.value / a.value, 1.0, 1e-6) << c.law.describe();
  }
}

TEST(AlphaMoment, DivergenceFlags) {
  EXPECT_FALSE(TailLaw::log_power_pareto(1, 2, e).alpha_moment(1).finite);
  EXPECT_FALSE(TailLaw::log_factor_pareto(1, 2, e).alpha_moment(1.2).finite);
  EXPECT_FALSE(TailLaw::super_heavy_log(2, e).alpha_moment(0.1).finite);
  EXPECT_TRUE(TailLaw::log_power_pareto(2, 2, e).alpha_moment(1).finite);
}

TEST(TailShape, RegularVariation) {
  for (const TailLaw& l : heavy_laws()) {
    const double a = l.alpha();
    for (double t : {2.0, 10.0}) {
      double prev = INFINITY;
      for (double lx = 10; lx <= 300; lx *= 1.5) {
        const double x = std::exp(lx);
        const double err = std::abs(l.survival(x * t) / l.survival(x) * std::pow(t, a) - 1.0);
        EXPECT_LE(err, prev + 1e-12) << l.describe() << " t=" << t << " ln x=" << lx;
        prev = err;
      }
      EXPECT_LT(prev, 0.05) << l.describe();
    }
  }
}

TEST(TailShape, TailConstant) {
  for (const TailLaw& l : heavy_laws()) {
    const TailOrder o = l.tail_order();
    const double x = std::exp(200.0);
    const double c = std::exp(std::log(l.survival(x)) + o.alpha * 200.0 - o.log_power * std::log(200.0));
    EXPECT_NEAR(c / l.tail_constant(), 1.0, 1e-9) << l.describe();
  }
}

TEST(TailShape, NegligibleAndComparable) {
  const TailOrder ln = TailLaw::lognormal(0, 1).tail_order();
  const TailOrder lfp = TailLaw::log_factor_pareto(1, 2, e).tail_order();
  const TailOrder lfp3 = TailLaw::log_factor_pareto(1, 3, e).tail_order();
  const TailOrder par = TailLaw::pareto(1, 1).tail_order();
  EXPECT_TRUE(tail_negligible(ln, lfp));
  EXPECT_TRUE(tail_negligible(lfp3, lfp));
  EXPECT_TRUE(tail_negligible(lfp, par));
  EXPECT_FALSE(tail_negligible(par, lfp));
  EXPECT_TRUE(tail_comparable(lfp, TailLaw::log_factor_pareto(1, 2, 5).tail_order()));
  EXPECT_FALSE(tail_comparable(lfp, lfp3));
}

TEST(Construction, RejectsBadParameters) {
  EXPECT_THROW(TailLaw::pareto(0, 1), DomainError);
  EXPECT_THROW(TailLaw::pareto(1, -1), DomainError);
  EXPECT_THROW(TailLaw::log_factor_pareto(1, 1, e), DomainError);
  EXPECT_THROW(TailLaw::log_factor_pareto(1, 2, 1), DomainError);
  EXPECT_THROW(TailLaw::super_heavy_log(0.5, e), DomainError);
  EXPECT_THROW(TailLaw::lognormal(0, 0), DomainError);
  EXPECT_THROW(TailLaw::log_power_pareto(1, 0, e), DomainError);
}

TEST(Construction, LogPowerNormalization) {
  // x1 = max(x0, e^((gamma-1)/alpha)) and the survival equals 1 there.
  const TailLaw l = TailLaw::log_power_pareto(1, 3, 2);
  const auto& p = std::get<LogPowerPareto>(l.params());
  EXPECT_NEAR(p.x1, std::exp(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(l.survival(p.x1), 1.0);
  EXPECT_NEAR(l.tail_constant(), p.x1 * std::pow(2.0, -2.0), 1e-12);
}
