#include "tailrisk/random.hpp"

namespace tailrisk {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Stream::Stream(std::uint64_t seed, std::uint64_t path_index) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_(path_index) {}

void Stream::seek(std::uint64_t k) noexcept {
  position_ = k;
  buffered_ = false;
}

double Stream::uniform() noexcept {
  // Each Philox block yields two 64-bit words, i.e. two draws.
  const std::uint64_t blk = position_ >> 1;
  if (!buffered_ || (position_ & 1u) == 0) {
    buffer_ = Philox4x32::block({static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32),
                                 static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)},
                                key_);
    buffered_ = true;
  }
  const bool second = (position_ & 1u) != 0;
  ++position_;
  return second ? to_open_unit(buffer_[2], buffer_[3]) : to_open_unit(buffer_[0], buffer_[1]);
}

}  // namespace tailrisk
