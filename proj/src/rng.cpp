#include "lfdse/rng.hpp"

#include <random>
#include <stdexcept>

namespace lfdse {

namespace {

constexpr std::uint32_t kMultA = 0xD2511F53u;
constexpr std::uint32_t kMultB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox_round(
    const std::array<std::uint32_t, 4>& ctr,
    const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t prod0 = std::uint64_t{kMultA} * ctr[0];
  const std::uint64_t prod1 = std::uint64_t{kMultB} * ctr[2];
  return {static_cast<std::uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
          static_cast<std::uint32_t>(prod1),
          static_cast<std::uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
          static_cast<std::uint32_t>(prod0)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    counter = philox_round(counter, key);
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return counter;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream_hi,
                           std::uint64_t stream_lo)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)} {
  // Fold each 64-bit stream id into one counter word; collisions would
  // need matching low and xor-folded halves, which the callers (scenario
  // ids, replicate indices) cannot produce.
  stream_hi_ = static_cast<std::uint32_t>(stream_hi) ^
               static_cast<std::uint32_t>(stream_hi >> 32) * 0x9E3779B9u;
  stream_lo_ = static_cast<std::uint32_t>(stream_lo) ^
               static_cast<std::uint32_t>(stream_lo >> 32) * 0x9E3779B9u;
}

PhiloxStream::result_type PhiloxStream::operator()() {
  if (buffered_ == 0) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32),
                          stream_lo_, stream_hi_},
                         key_);
    ++block_;
    buffered_ = 4;
  }
  return buffer_[4 - buffered_--];
}

double PhiloxStream::uniform01() {
  const std::uint64_t hi = (*this)();
  const std::uint64_t lo = (*this)();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;  // 53 bits
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::uint64_t binomial_draw(std::uint64_t n, double p, PhiloxStream& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_draw: p must be in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(rng);
}

std::vector<std::uint64_t> multinomial_draw(std::uint64_t n,
                                            std::span<const double> probs,
                                            PhiloxStream& rng) {
  if (probs.empty())
    throw std::invalid_argument("multinomial_draw: empty probability vector");
  double remaining = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument("multinomial_draw: negative probability");
    remaining += p;
  }
  if (!(remaining > 0.0))
    throw std::invalid_argument("multinomial_draw: probabilities sum to zero");

  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t left = n;
  for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
    const double cond = remaining > 0.0 ? probs[i] / remaining : 0.0;
    counts[i] = binomial_draw(left, cond < 1.0 ? cond : 1.0, rng);
    left -= counts[i];
    remaining -= probs[i];
  }
  counts.back() = left;  // remainder keeps the total exact
  return counts;
}

}  // namespace lfdse
