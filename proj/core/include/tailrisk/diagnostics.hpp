#pragma once

#include "tailrisk/asymptotics.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/model.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailrisk {

struct RatioRow {
  double x;
  double estimate;
  double est_err;
  double asymptote;
  double ratio;
  double ci_low;
  double ci_high;
};

struct Verdict {
  double final_ratio_error = 0.0;  // |ratio - 1| at the largest x
  // |ratio - 1| decreases along the grid; steps whose interval already
  // covers 1 count as decreasing.
  bool trend = false;
  bool pass = false;
};

struct RatioTable {
  std::vector<RatioRow> rows;
  Verdict verdict;
};

struct Valued {
  double value;
  double error;
};

// `points` geometrically spaced values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

// Parses "lo:hi:points".
std::vector<double> parse_grid(std::string_view text);

// Assembles rows from per-x evaluations. The interval is
// ratio +- (z * est_err + ratio * asym_err) / asymptote. `tolerance` bounds
// the final-point error for a passing verdict.
RatioTable build_ratio_table(std::span<const double> grid, const std::function<Valued(double)>& estimate,
                             const std::function<Valued(double)>& asymptote, double z = 3.0, double tolerance = 0.1);

enum class TailSource { oracle, monte_carlo };

std::string_view tail_source_name(TailSource s) noexcept;
TailSource parse_tail_source(std::string_view name);

struct RatioOptions {
  TailSource estimator = TailSource::monte_carlo;
  TailMethod method = TailMethod::asmussen_kroese;
  BaseMethod base = BaseMethod::automatic;
  MonteCarlo mc;
  double tolerance = 0.1;
};

// Tail of S_n or M_n against an evaluated expansion over the grid, which
// must be strictly increasing with at least four points.
RatioTable ratio_table(const ModelSpec& spec, Which which, const Expansion& expansion, std::span<const double> grid,
                       const RatioOptions& opt);

struct Extrapolation {
  double limit;
  double slope;     // coefficient of 1 / ln x
  double residual;  // root mean square of the fit residuals
  bool low_confidence;
};

// Least-squares fit of ratio = limit + slope / ln x. Exact for tables affine
// in 1 / ln x; flags noisy or non-monotone tables instead of failing.
Extrapolation extrapolate_limit(const RatioTable& table);

// Columns x, estimate, est_err, asymptote, ratio, ci_low, ci_high, preceded
// by the given lines as '#' comments.
void write_ratio_csv(std::ostream& os, const RatioTable& table, std::span<const std::string> header = {});

}  // namespace tailrisk
