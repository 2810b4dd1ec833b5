#include "tailrisk/diagnostics.hpp"

#include "tailrisk/errors.hpp"
#include "tailrisk/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace tailrisk {

namespace {

void check_grid(std::span<const double> grid, std::size_t min_points) {
  if (grid.size() < min_points) {
    throw DomainError("ratio_table: grid needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw DomainError("ratio_table: grid values must be finite");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw DomainError("ratio_table: grid must be strictly increasing");
  }
}

double parse_number(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("run.grid", std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("geometric_grid: need 0 < lo < hi and points >= 2");
  std::vector<double> g(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo * std::exp(step * static_cast<double>(k));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw ConfigError("run.grid", "expected lo:hi:points");
  const double lo = parse_number(text.substr(0, a), "lower grid end");
  const double hi = parse_number(text.substr(a + 1, b - a - 1), "upper grid end");
  const double pts = parse_number(text.substr(b + 1), "point count");
  if (!(pts >= 2.0) || pts != std::floor(pts)) throw ConfigError("run.grid", "point count must be an integer >= 2");
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("run.grid", "need 0 < lo < hi");
  return geometric_grid(lo, hi, static_cast<std::size_t>(pts));
}

RatioTable build_ratio_table(std::span<const double> grid, const std::function<Valued(double)>& estimate,
                             const std::function<Valued(double)>& asymptote, double z, double tolerance) {
  check_grid(grid, 1);
  RatioTable t;
  for (double x : grid) {
    const Valued e = estimate(x);
    const Valued a = asymptote(x);
    RatioRow r{x, e.value, e.error, a.value, 0.0, 0.0, 0.0};
    r.ratio = e.value / a.value;
    const double half = (z * e.error + std::abs(r.ratio) * a.error) / std::abs(a.value);
    r.ci_low = r.ratio - half;
    r.ci_high = r.ratio + half;
    t.rows.push_back(r);
  }
  auto covers_one = [](const RatioRow& r) { return r.ci_low <= 1.0 && 1.0 <= r.ci_high; };
  t.verdict.trend = true;
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    const RatioRow& p = t.rows[k - 1];
    const RatioRow& c = t.rows[k];
    const bool closer = std::abs(c.ratio - 1.0) < std::abs(p.ratio - 1.0);
    if (!closer && !(covers_one(p) && covers_one(c))) t.verdict.trend = false;
  }
  const RatioRow& last = t.rows.back();
  t.verdict.final_ratio_error = std::abs(last.ratio - 1.0);
  t.verdict.pass = t.verdict.trend && (t.verdict.final_ratio_error <= tolerance || covers_one(last));
  return t;
}

std::string_view tail_source_name(TailSource s) noexcept { return s == TailSource::oracle ? "oracle" : "conditional-mc"; }

TailSource parse_tail_source(std::string_view name) {
  if (name == "oracle") return TailSource::oracle;
  if (name == "conditional-mc" || name == "mc") return TailSource::monte_carlo;
  throw ConfigError("run.estimator", "unknown tail estimator '" + std::string(name) + "'");
}

RatioTable ratio_table(const ModelSpec& spec, Which which, const Expansion& expansion, std::span<const double> grid,
                       const RatioOptions& opt) {
  check_grid(grid, 4);
  if (opt.estimator == TailSource::oracle && spec.n() > 2) {
    throw UnsupportedError("ratio_table: oracle estimator is limited to n <= 2");
  }
  const auto estimate = [&](double x) -> Valued {
    if (opt.estimator == TailSource::oracle) {
      const oracle::Exact r = oracle::model_tail(spec, which, x);
      return {r.value, r.error};
    }
    const TailEstimate r = estimate_tail(spec, which, x, opt.method, opt.mc);
    return {r.p_hat, r.std_error};
  };
  const auto asymptote = [&](double x) -> Valued {
    const Evaluation e = evaluate_expansion(expansion, spec, x, opt.base, opt.mc);
    return {e.value, e.error};
  };
  const double z = opt.estimator == TailSource::oracle ? 1.0 : 3.0;
  return build_ratio_table(grid, estimate, asymptote, z, opt.tolerance);
}

Extrapolation extrapolate_limit(const RatioTable& table) {
  const std::size_t n = table.rows.size();
  if (n < 3) throw DomainError("extrapolate_limit: need at least 3 rows");
  double su = 0, sr = 0, suu = 0, sur = 0;
  for (const RatioRow& r : table.rows) {
    if (!(r.x > 1.0)) throw DomainError("extrapolate_limit: x must exceed 1");
    const double u = 1.0 / std::log(r.x);
    su += u;
    sr += r.ratio;
    suu += u * u;
    sur += u * r.ratio;
  }
  const double nn = static_cast<double>(n);
  const double mu = su / nn, mr = sr / nn;
  const double var = suu / nn - mu * mu;
  Extrapolation e{};
  e.slope = var > 0.0 ? (sur / nn - mu * mr) / var : 0.0;
  e.limit = mr - e.slope * mu;
  double ss = 0.0;
  for (const RatioRow& r : table.rows) {
    const double fit = e.limit + e.slope / std::log(r.x);
    ss += (r.ratio - fit) * (r.ratio - fit);
  }
  e.residual = std::sqrt(ss / nn);
  // Residuals beyond the rows' own uncertainty, or a non-monotone table,
  // make the extrapolation unreliable.
  double ci = 0.0;
  for (const RatioRow& r : table.rows) ci = std::max(ci, 0.5 * (r.ci_high - r.ci_low));
  bool monotone_up = true, monotone_down = true;
  for (std::size_t k = 1; k < n; ++k) {
    monotone_up = monotone_up && table.rows[k].ratio >= table.rows[k - 1].ratio;
    monotone_down = monotone_down && table.rows[k].ratio <= table.rows[k - 1].ratio;
  }
  e.low_confidence = e.residual > std::max(1e-3 * std::abs(e.limit), ci) || !(monotone_up || monotone_down);
  return e;
}

void write_ratio_csv(std::ostream& os, const RatioTable& table, std::span<const std::string> header) {
  for (const std::string& h : header) os << "# " << h << '\n';
  const auto old = os.precision(12);
  os << "x,estimate,est_err,asymptote,ratio,ci_low,ci_high\n";
  for (const RatioRow& r : table.rows) {
    os << r.x << ',' << r.estimate << ',' << r.est_err << ',' << r.asymptote << ',' << r.ratio << ',' << r.ci_low << ','
       << r.ci_high << '\n';
  }
  os.precision(old);
}

}  // namespace tailrisk
