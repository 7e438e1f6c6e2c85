#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace lfdse {

// Philox4x32-10 keyed block cipher: 128-bit counter, 64-bit key, four
// 32-bit words per block.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A counter-based stream usable as a standard UniformRandomBitGenerator.
// (seed, stream_hi, stream_lo) fully determines the sequence: the stream
// ids occupy the top counter words and the block index the bottom ones,
// so distinct (scenario, replicate) pairs never share a block. Streams
// can be created and consumed in any order or thread.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream_hi,
               std::uint64_t stream_lo);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  double uniform01();  // in [0, 1), 53-bit resolution

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_hi_, stream_lo_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned buffered_ = 0;
};

// One binomial(n, p) draw.
std::uint64_t binomial_draw(std::uint64_t n, double p, PhiloxStream& rng);

// Multinomial(n, probs) by sequential conditional binomials. probs must
// be nonnegative with a positive sum (it is normalized internally); the
// returned counts always sum to n.
std::vector<std::uint64_t> multinomial_draw(std::uint64_t n,
                                            std::span<const double> probs,
                                            PhiloxStream& rng);

}  // namespace lfdse
