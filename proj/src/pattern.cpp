#include "lfdse/pattern.hpp"

#include <sstream>
#include <stdexcept>

namespace lfdse {

ComparisonPattern::ComparisonPattern(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  if (bits_.empty() || bits_.size() > static_cast<std::size_t>(kMaxPatternVars))
    throw std::invalid_argument("pattern length must be in [1, " +
                                std::to_string(kMaxPatternVars) + "]");
  for (auto b : bits_)
    if (b != 0 && b != 1)
      throw std::invalid_argument("pattern bits must be 0 or 1");
}

ComparisonPattern ComparisonPattern::from_code(std::uint32_t code, int k) {
  if (k < 1 || k > kMaxPatternVars)
    throw std::invalid_argument("pattern length must be in [1, " +
                                std::to_string(kMaxPatternVars) + "]");
  if (code >= (std::uint32_t{1} << k))
    throw std::invalid_argument("pattern code out of range for k=" +
                                std::to_string(k));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(k));
  for (int v = 0; v < k; ++v)
    bits[static_cast<std::size_t>(v)] =
        static_cast<std::uint8_t>((code >> (k - 1 - v)) & 1u);
  return ComparisonPattern(std::move(bits));
}

ComparisonPattern ComparisonPattern::parse(const std::string& text) {
  std::vector<std::uint8_t> bits;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t\r");
    if (first == std::string::npos)
      throw std::invalid_argument("empty field in pattern '" + text + "'");
    field = field.substr(first, last - first + 1);
    if (field == "0")
      bits.push_back(0);
    else if (field == "1")
      bits.push_back(1);
    else
      throw std::invalid_argument("bad pattern field '" + field + "' in '" +
                                  text + "'");
  }
  if (bits.empty())
    throw std::invalid_argument("empty pattern '" + text + "'");
  return ComparisonPattern(std::move(bits));
}

std::uint32_t ComparisonPattern::code() const {
  std::uint32_t c = 0;
  for (auto b : bits_) c = (c << 1) | b;
  return c;
}

std::string ComparisonPattern::str() const {
  std::string out;
  for (std::size_t v = 0; v < bits_.size(); ++v) {
    if (v) out += ',';
    out += bits_[v] ? '1' : '0';
  }
  return out;
}

std::vector<ComparisonPattern> enumerate_patterns(int k) {
  if (k < 1 || k > kMaxPatternVars)
    throw std::invalid_argument("enumerate_patterns: k must be in [1, " +
                                std::to_string(kMaxPatternVars) + "]");
  const std::uint32_t n = std::uint32_t{1} << k;
  std::vector<ComparisonPattern> out;
  out.reserve(n);
  for (std::uint32_t code = 0; code < n; ++code)
    out.push_back(ComparisonPattern::from_code(code, k));
  return out;
}

}  // namespace lfdse
