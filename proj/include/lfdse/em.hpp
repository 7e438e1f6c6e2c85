#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lfdse/linkage_model.hpp"
#include "lfdse/pattern.hpp"

namespace lfdse {

// Aggregated comparison patterns: one cell per distinct pattern, sorted by
// pattern code. This is the sufficient statistic for the mixture fit, so
// EM iterations cost O(cells * k) instead of O(pairs * k).
class PatternCounts {
 public:
  struct Cell {
    std::uint32_t code = 0;
    std::uint64_t count = 0;
  };

  PatternCounts() = default;  // k = 0, empty

  // Merges duplicate codes and drops zero counts.
  static PatternCounts from_cells(int k, std::vector<Cell> cells);

  int k() const { return k_; }
  std::uint64_t total() const { return total_; }
  bool empty() const { return cells_.empty(); }
  std::span<const Cell> cells() const { return cells_; }
  std::uint64_t count_of(std::uint32_t code) const;
  std::uint64_t count_of(const ComparisonPattern& pattern) const;

 private:
  int k_ = 0;
  std::uint64_t total_ = 0;
  std::vector<Cell> cells_;
};

// Collapses per-pair patterns into counts. All patterns must share one k.
PatternCounts aggregate_pairs(std::span<const ComparisonPattern> patterns);

struct EmConfig {
  LinkageParams init;
  double tol = 1e-7;     // max absolute parameter change
  int max_iter = 1000;
  double clamp = 1e-6;   // boundary guard applied after every M-step

  // m_v = 0.9, u_v = 0.1 for all v, p = min(1/sqrt(total), 0.5).
  static EmConfig defaults(int k, std::uint64_t total);

  void validate() const;
};

struct EmFit {
  LinkageParams params;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;  // observed-data loglik after each update
  // Posterior match probability per cell, aligned with counts.cells();
  // this is the E-step output that produced the final parameters, so
  // sum(count * posterior) == p_hat * total.
  std::vector<double> posterior;
};

// Posterior match probabilities, one per cell of `counts`:
// g = p*m_pattern / (p*m_pattern + (1-p)*u_pattern).
std::vector<double> e_step(const PatternCounts& counts,
                           const LinkageParams& params);

// Weighted-frequency updates, clamped to [clamp, 1-clamp]. A component
// with zero posterior mass has its rates pinned at the boundary clamp;
// inside fit_em the posteriors are strictly interior so this never fires.
LinkageParams m_step(const PatternCounts& counts,
                     std::span<const double> posterior, double clamp = 1e-6);

// Observed-data log-likelihood sum(count * log(p*m_g + (1-p)*u_g)).
double log_likelihood(const PatternCounts& counts,
                      const LinkageParams& params);

// Alternates e_step/m_step until the max absolute parameter change drops
// below tol or max_iter is reached. After the loop, if the component
// labelled "match" has lower total agreement than the other (sum m < sum u)
// the components are swapped and p becomes 1-p.
EmFit fit_em(const PatternCounts& counts, const EmConfig& config);
EmFit fit_em(const PatternCounts& counts);  // EmConfig::defaults

// True when the fitted match proportion sits on the boundary clamp, i.e.
// the fit carries no usable mixture information.
bool em_boundary_collapsed(const EmFit& fit, double clamp);

}  // namespace lfdse
