#pragma once

#include <array>
#include <cstdint>

namespace tailrisk {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
// A block is a pure function of (key, counter), so any substream can be
// reproduced without replaying its predecessors.
class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// Stream of uniforms for one Monte Carlo path.
//
// The path is identified by (seed, path_index); draw k of the path is
// fixed regardless of which worker evaluates it, so results do not depend
// on the worker count.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t path_index) noexcept;

  // Uniform in the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;

  // Skip to draw number `k` of this path.
  void seek(std::uint64_t k) noexcept;

  std::uint64_t position() const noexcept { return position_; }

private:
  Philox4x32::Key key_{};
  std::uint64_t path_ = 0;
  std::uint64_t position_ = 0;
  Philox4x32::Counter buffer_{};
  bool buffered_ = false;
};

}  // namespace tailrisk
