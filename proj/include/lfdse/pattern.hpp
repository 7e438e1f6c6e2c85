#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace lfdse {

// Hard cap on the number of comparison variables; the pattern space has
// 2^k elements and several routines materialize all of it.
inline constexpr int kMaxPatternVars = 20;

// A length-k vector of binary agreement outcomes, one per comparison
// variable. Variable 1 is the leftmost bit; the integer code is the bits
// read MSB-first, so code order == lexicographic order.
class ComparisonPattern {
 public:
  explicit ComparisonPattern(std::vector<std::uint8_t> bits);
  static ComparisonPattern from_code(std::uint32_t code, int k);

  // Parses "1,0,1,1"; k is inferred from the field count.
  static ComparisonPattern parse(const std::string& text);

  int k() const { return static_cast<int>(bits_.size()); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool bit(int v) const { return bits_[static_cast<std::size_t>(v)] != 0; }
  std::uint32_t code() const;
  std::string str() const;

  friend auto operator<=>(const ComparisonPattern&,
                          const ComparisonPattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// All 2^k patterns in lexicographic order.
std::vector<ComparisonPattern> enumerate_patterns(int k);

}  // namespace lfdse
