#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace tailrisk {

class Stream;

enum class Family { Pareto, LogPowerPareto, LogFactorPareto, SuperHeavyLog, Lognormal, PointMass, NegatedShifted };

std::string_view family_name(Family f) noexcept;

// Survival (x0/x)^alpha on [x0, inf).
struct Pareto {
  double alpha;
  double x0;
};

// Survival min(1, K (ln x)^(gamma-1) x^-alpha) on [x1, inf), where
// x1 = max(x0, e^((gamma-1)/alpha)) is the point past which the formula is
// monotone and K = sv_scale x1^alpha (ln x1)^(1-gamma).
struct LogPowerPareto {
  double alpha;
  double gamma;
  double x0;
  double sv_scale;
  // Derived at construction.
  double x1;
  double log_k;
  double lower;  // left support endpoint (>= x1 when sv_scale > 1)
};

// Survival (ln x0 / ln x)^beta (x0/x)^alpha on [x0, inf), x0 > 1.
struct LogFactorPareto {
  double alpha;
  double beta;
  double x0;
};

// Survival (ln x0 / ln x)^beta on [x0, inf): slowly varying, index 0.
struct SuperHeavyLog {
  double beta;
  double x0;
};

struct Lognormal {
  double mu;
  double sigma;
};

struct PointMass {
  double value;
};

class TailLaw;

// negate ? shift - base : base - shift.
struct NegatedShifted {
  std::shared_ptr<const TailLaw> base;
  bool negate;
  double shift;
};

// Upper-tail shape: survival ~ C (ln x)^log_power x^-alpha, or lighter than
// any such function when `light` is set.
struct TailOrder {
  bool light = false;
  double alpha = 0.0;
  double log_power = 0.0;
};

// Result of a (possibly divergent) moment computation.
struct Moment {
  double value;
  bool finite;
};

// Immutable descriptor of a one-dimensional law. Cheap to copy; safe to
// share between threads.
class TailLaw {
public:
  using Params = std::variant<Pareto, LogPowerPareto, LogFactorPareto, SuperHeavyLog, Lognormal, PointMass, NegatedShifted>;

  static TailLaw pareto(double alpha, double x0);
  static TailLaw log_power_pareto(double alpha, double gamma, double x0, double sv_scale = 1.0);
  static TailLaw log_factor_pareto(double alpha, double beta, double x0);
  static TailLaw super_heavy_log(double beta, double x0);
  static TailLaw lognormal(double mu, double sigma);
  static TailLaw point_mass(double value);
  // base - shift
  static TailLaw shifted(const TailLaw& base, double shift);
  // shift - base
  static TailLaw negated(const TailLaw& base, double shift);

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }

  // P(V > x). Total: returns 1 below the support and 0 at +inf.
  double survival(double x) const;
  // P(V <= x).
  double cdf(double x) const;
  // P(V < x); differs from cdf only for point masses.
  double cdf_left(double x) const;
  double density(double x) const;
  // x with survival(x) = u, for survival level u in (0, 1].
  double quantile(double u) const;
  double sample(Stream& stream) const;
  // Inverse transform of a survival-level deviate.
  double from_uniform(double u) const { return quantile(u); }

  // E (V_+)^p, with (z)_+^0 read as 1{z > 0}.
  Moment alpha_moment(double p) const;
  // Same moment by quadrature of p v^(p-1) P(V > v), bypassing closed forms.
  Moment alpha_moment_quadrature(double p) const;

  // Regular-variation index of the upper tail (0 for slowly varying
  // families, +inf for light ones).
  double alpha() const noexcept;
  TailOrder tail_order() const noexcept;
  // Upper tail order of |V|.
  TailOrder abs_tail_order() const noexcept;
  // Constant C in survival(x) ~ C (ln x)^log_power x^-alpha.
  double tail_constant() const;

  double support_lower() const noexcept;
  double support_upper() const noexcept;
  bool is_positive() const noexcept { return support_lower() > 0.0 || family() == Family::Lognormal; }
  bool is_point_mass() const noexcept { return family() == Family::PointMass; }

  std::string describe() const;

private:
  explicit TailLaw(Params p) : params_(std::move(p)) {}
  Params params_;
};

// P(a + b V > x) in closed form from the law's survival function.
double affine_exceed(const TailLaw& law, double a, double b, double x);

// F_bar(x) = o(G_bar(x)) decided from the tail orders.
bool tail_negligible(const TailOrder& f, const TailOrder& g) noexcept;
// F_bar and G_bar are of the same order (same index and log power).
bool tail_comparable(const TailOrder& f, const TailOrder& g) noexcept;

}  // namespace tailrisk
