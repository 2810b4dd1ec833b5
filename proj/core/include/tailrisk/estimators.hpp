#pragma once

#include "tailrisk/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string_view>

namespace tailrisk {

class Stream;

enum class TailMethod { crude, conditional, asmussen_kroese };

std::string_view method_name(TailMethod m) noexcept;
// Accepts "crude", "conditional", "asmussen-kroese" (or "ak").
TailMethod parse_method(std::string_view name);

struct TailEstimate {
  double x = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
  TailMethod method = TailMethod::crude;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

enum class VarianceValidity { finite_variance_proven, heavy_variance_warning };

std::string_view validity_name(VarianceValidity v) noexcept;

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  VarianceValidity validity = VarianceValidity::finite_variance_proven;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool truncated = false;
  double bias_bound = 0.0;  // nonzero only for truncated estimates
};

struct MonteCarlo {
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// Empirical frequency of {S_n > x} or {M_n > x}.
TailEstimate crude_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc);

// E G_1bar(x / T) with T = X_1 + S^(2)_{n-1} (or the M analogue): Y_1 is
// integrated out. Falls back to crude for x <= 0.
TailEstimate conditional_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc);

// Conditional Monte Carlo over the most extreme coordinate: every random
// coordinate takes a turn at being the one with the smallest survival
// level and is integrated out on that event. Keeps bounded relative error
// when the event is driven by a single large factor. Falls back to crude
// for x <= 0.
TailEstimate asmussen_kroese_tail(const ModelSpec& spec, Which which, double x, const MonteCarlo& mc);

TailEstimate estimate_tail(const ModelSpec& spec, Which which, double x, TailMethod method, const MonteCarlo& mc);

// One draw of a path functional Z from the path stream.
using PathFunctional = std::function<double(Stream&)>;

// E (Z)_+^alpha, with the alpha = 0 reading 1{Z > 0}. `tail_index` is the
// regular-variation index of Z when known (+inf for bounded or light Z);
// an index <= 2 alpha raises the heavy-variance warning.
MomentEstimate plus_moment(const PathFunctional& z, double alpha, const MonteCarlo& mc,
                           double tail_index = std::numeric_limits<double>::infinity());

struct PairedOptions {
  Which which = Which::S;
  // Also subtract (X_i)_+^alpha inside the expectation.
  bool subtract_x = false;
  // Winsorize at the empirical 1 - 1e-4 quantile of |difference|. Applied
  // automatically for alpha >= 2.
  bool truncate = false;
};

// E[(X_i + T)_+^alpha - (T)_+^alpha] as a single expectation over common
// paths, T = S^(i+1)_{n-i} (or M^(i+1)_{n-i}).
MomentEstimate paired_difference_moment(const ModelSpec& spec, std::size_t i, double alpha, const MonteCarlo& mc,
                                        const PairedOptions& opt = {});

// E sum_i w_i [(X_i + T_i)_+^alpha - (T_i)_+^alpha] over common paths, the
// weighted combination estimated as one expectation so its standard error
// accounts for the correlation between periods.
MomentEstimate paired_difference_sum(const ModelSpec& spec, std::span<const double> weights, double alpha,
                                     const MonteCarlo& mc, const PairedOptions& opt = {});

}  // namespace tailrisk
