#include "tailrisk/model.hpp"

#include "parallel.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace tailrisk {

void ModelSpec::validate() const {
  const std::size_t horizon = n();
  if (horizon == 0) throw DomainError("model: horizon n must be positive");
  if (x_laws.size() != horizon) {
    throw DomainError("model: expected " + std::to_string(horizon) + " insurance laws, got " + std::to_string(x_laws.size()));
  }
  for (std::size_t i = 0; i < horizon; ++i) {
    if (!y_laws[i].is_positive()) {
      throw DomainError("model: y_laws[" + std::to_string(i) + "] must be supported on (0, inf)");
    }
  }
  if (weights) {
    if (weights->size() != horizon) throw DomainError("model: weights must have length n");
    const WeightBounds b = weight_bounds.value_or(WeightBounds{*std::min_element(weights->begin(), weights->end()),
                                                               *std::max_element(weights->begin(), weights->end())});
    if (!(b.lower > 0.0 && b.lower <= b.upper && std::isfinite(b.upper))) {
      throw DomainError("model: weight bounds must satisfy 0 < a <= b < inf");
    }
    for (std::size_t i = 0; i < horizon; ++i) {
      const double c = (*weights)[i];
      if (!(c >= b.lower && c <= b.upper)) {
        throw DomainError("model: weight c_" + std::to_string(i + 1) + " outside [a, b]");
      }
      const auto* pm = std::get_if<PointMass>(&x_laws[i].params());
      if (pm == nullptr || pm->value != c) throw DomainError("model: weighted mode requires x_laws to be the weights");
    }
  }
}

ModelSpec ModelSpec::iid(const TailLaw& x, const TailLaw& y, std::size_t n) {
  ModelSpec spec;
  spec.x_laws.assign(n, x);
  spec.y_laws.assign(n, y);
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::weighted(std::vector<TailLaw> y_laws, std::vector<double> weights, WeightBounds bounds) {
  ModelSpec spec;
  spec.y_laws = std::move(y_laws);
  for (double c : weights) {
    if (!(c > 0.0)) throw DomainError("model: weights must be positive");
    spec.x_laws.push_back(TailLaw::point_mass(c));
  }
  spec.weights = std::move(weights);
  spec.weight_bounds = bounds;
  spec.validate();
  return spec;
}

void draw_path(const ModelSpec& spec, Stream& stream, std::span<double> x, std::span<double> y, std::span<double> ux,
               std::span<double> uy) {
  const std::size_t n = spec.n();
  double shared = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u_x = stream.uniform();
    const double u_y = stream.uniform();
    if (i == 0) shared = u_x;
    const double level_x = spec.x_dependence == Dependence::comonotone ? shared : u_x;
    const TailLaw& xl = spec.x_laws[i];
    const TailLaw& yl = spec.y_laws[i];
    x[i] = xl.quantile(level_x);
    y[i] = yl.quantile(u_y);
    if (!ux.empty()) ux[i] = xl.is_point_mass() ? 1.0 : level_x;
    if (!uy.empty()) uy[i] = yl.is_point_mass() ? 1.0 : u_y;
  }
  if (spec.x_dependence == Dependence::custom) {
    if (!spec.joint_sampler) throw ConfigError("model.x_dependence", "custom dependence requires a joint sampler");
    spec.joint_sampler(stream, x.first(n));
  }
}

ShiftedValue shifted_value(std::span<const double> x, std::span<const double> y, std::size_t l, std::size_t m) {
  double s = 0.0;
  double mx = 0.0;
  for (std::size_t i = l + m - 1; i >= l && m > 0; --i) {
    const double xi = x[i - 1];
    const double yi = y[i - 1];
    s = yi * (xi + s);
    mx = yi * std::max(0.0, xi + mx);
    if (i == l) break;
  }
  return {s, mx};
}

namespace {

void check_runnable(const ModelSpec& spec, std::size_t count) {
  spec.validate();
  if (count == 0) throw DomainError("simulate: count must be at least 1");
  if (spec.x_dependence == Dependence::custom && !spec.joint_sampler) {
    throw ConfigError("model.x_dependence", "custom dependence requires a joint sampler");
  }
}

}  // namespace

std::vector<PathSample> simulate(const ModelSpec& spec, std::size_t count, std::uint64_t seed, unsigned workers) {
  check_runnable(spec, count);
  const std::size_t n = spec.n();
  std::vector<PathSample> out(count);
  detail::for_each_block(count, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> x(n), y(n);
    for (std::size_t k = begin; k < end; ++k) {
      Stream stream(seed, k);
      draw_path(spec, stream, x, y);
      PathSample& p = out[k];
      const ShiftedValue v = shifted_value(x, y, 1, n);
      p.s_n = v.s;
      p.m_n = v.m;
      p.products.resize(n);
      double prod = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        prod *= y[i];
        p.products[i] = prod;
      }
    }
  });
  return out;
}

std::vector<ShiftedSample> simulate_shifted(const ModelSpec& spec, std::size_t l, std::size_t m, std::size_t count,
                                            std::uint64_t seed, unsigned workers) {
  check_runnable(spec, count);
  const std::size_t n = spec.n();
  if (l < 1 || l + m - 1 > n) throw DomainError("simulate_shifted: need 1 <= l and l + m - 1 <= n");
  std::vector<ShiftedSample> out(count);
  detail::for_each_block(count, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> x(n), y(n);
    for (std::size_t k = begin; k < end; ++k) {
      Stream stream(seed, k);
      draw_path(spec, stream, x, y);
      const ShiftedValue v = shifted_value(x, y, l, m);
      out[k] = {v.s, v.m};
    }
  });
  return out;
}

void write_samples_csv(std::ostream& os, std::span<const PathSample> samples) {
  const auto old_precision = os.precision(17);
  os << "index,s_n,m_n\n";
  for (std::size_t k = 0; k < samples.size(); ++k) os << k << ',' << samples[k].s_n << ',' << samples[k].m_n << '\n';
  os.precision(old_precision);
}

}  // namespace tailrisk
