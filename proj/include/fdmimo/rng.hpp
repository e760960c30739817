#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace fdmimo {

// Philox4x32-10 keyed counter block cipher. Stateless: the same
// (key, counter) pair always produces the same 128-bit block, which is what
// makes trial-indexed substreams and parallel reductions reproducible.
namespace philox {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter block(Counter x, Key key) {
  std::uint32_t k0 = key[0];
  std::uint32_t k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t(kMult0) * x[0];
    const std::uint64_t p1 = std::uint64_t(kMult1) * x[2];
    x = {std::uint32_t(p1 >> 32) ^ x[1] ^ k0, std::uint32_t(p1),
         std::uint32_t(p0 >> 32) ^ x[3] ^ k1, std::uint32_t(p0)};
  }
  return x;
}

}  // namespace philox

// Finalizer from splitmix64; used to spread structured stream tags over the
// full 64-bit id space before they become Philox counter words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One independent random stream out of a 2^64-member family sharing a seed.
// The seed is the Philox key, the stream id occupies the high counter words,
// and the block index occupies the low counter words, so streams never
// overlap and any stream can be reconstructed from (seed, id) alone.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        stream_id_(stream_id) {}

  std::uint64_t seed() const {
    return std::uint64_t(key_[0]) | (std::uint64_t(key_[1]) << 32);
  }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derived stream whose id depends only on (parent id, tag), not on how
  // much of the parent has been consumed.
  RngStream split(std::uint64_t tag) const {
    RngStream child(seed(), mix64(stream_id_ ^ mix64(tag)));
    return child;
  }

  std::uint32_t next_u32() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller (one draw per call, no cached spare, so
  // the consumption pattern stays position-independent).
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    return r * std::cos(2.0 * M_PI * uniform());
  }

  // Circularly symmetric complex normal with E|z|^2 = variance.
  std::complex<double> cnormal(double variance = 1.0) {
    const double r = std::sqrt(-variance * std::log(uniform_pos()));
    const double phi = 2.0 * M_PI * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  void refill() {
    buf_ = philox::block(
        {std::uint32_t(block_), std::uint32_t(block_ >> 32),
         std::uint32_t(stream_id_), std::uint32_t(stream_id_ >> 32)},
        key_);
    ++block_;
    buf_pos_ = 0;
  }

  philox::Key key_;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
};

}  // namespace fdmimo
