#pragma once

#include "tailrisk/distributions.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tailrisk {

class Stream;

enum class Which { S, M };

enum class Dependence { independent, comonotone, custom };

// Fills the whole vector (X_1..X_n) for one path. The stream is positioned
// past the draws reserved for the independent coordinates.
using JointSampler = std::function<void(Stream&, std::span<double>)>;

struct WeightBounds {
  double lower;
  double upper;
};

// Discrete-time risk model S_n = sum_i X_i prod_{j<=i} Y_j.
//
// In weighted mode the insurance risks are the constants c_i, stored as
// point masses in x_laws.
struct ModelSpec {
  std::vector<TailLaw> x_laws;
  std::vector<TailLaw> y_laws;
  Dependence x_dependence = Dependence::independent;
  JointSampler joint_sampler;
  std::optional<std::vector<double>> weights;
  std::optional<WeightBounds> weight_bounds;

  std::size_t n() const noexcept { return y_laws.size(); }

  // Throws DomainError/ConfigError on violated invariants.
  void validate() const;

  static ModelSpec iid(const TailLaw& x, const TailLaw& y, std::size_t n);
  static ModelSpec weighted(std::vector<TailLaw> y_laws, std::vector<double> weights, WeightBounds bounds);
};

// Uniform draws per path: X_i at slot 2(i-1), Y_i at slot 2(i-1)+1.
// Interleaving keeps the first 2n draws common to every horizon >= n.
constexpr std::uint64_t x_slot(std::size_t i) noexcept { return 2 * (i - 1); }
constexpr std::uint64_t y_slot(std::size_t i) noexcept { return 2 * (i - 1) + 1; }

// Draws one path of (X_i, Y_i), i = 1..n, together with the survival levels
// u_i used for each coordinate (point masses report 1).
void draw_path(const ModelSpec& spec, Stream& stream, std::span<double> x, std::span<double> y,
               std::span<double> ux = {}, std::span<double> uy = {});

struct ShiftedValue {
  double s;
  double m;
};

// S_m^(l) and M_m^(l) by the backward recursion
// S^(l)_m = Y_l (X_l + S^(l+1)_{m-1}),  M^(l)_m = Y_l (X_l + M^(l+1)_{m-1})_+.
// Indices are 1-based as in the model; m = 0 yields (0, 0).
ShiftedValue shifted_value(std::span<const double> x, std::span<const double> y, std::size_t l, std::size_t m);

struct PathSample {
  double s_n;
  double m_n;
  std::vector<double> products;  // prod_{j<=i} Y_j, i = 1..n
};

struct ShiftedSample {
  double s;
  double m;
};

std::vector<PathSample> simulate(const ModelSpec& spec, std::size_t count, std::uint64_t seed, unsigned workers);

std::vector<ShiftedSample> simulate_shifted(const ModelSpec& spec, std::size_t l, std::size_t m, std::size_t count,
                                            std::uint64_t seed, unsigned workers);

// CSV with header "index,s_n,m_n".
void write_samples_csv(std::ostream& os, std::span<const PathSample> samples);

}  // namespace tailrisk
