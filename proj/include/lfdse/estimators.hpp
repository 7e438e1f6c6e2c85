#pragma once

#include <cstdint>
#include <span>

#include "lfdse/linkage_model.hpp"
#include "lfdse/pattern.hpp"

namespace lfdse {

// Observed two-list counts: first-list total, second-list total, and the
// number of elements on both lists.
struct DualCounts {
  std::uint64_t n1p = 0;
  std::uint64_t np1 = 0;
  std::uint64_t n11 = 0;

  std::uint64_t omega() const { return n1p * np1; }  // all cross pairs
  void validate() const;
};

enum class EstimatorKind { Dse, DseFloor, DseEps, Lfdse };

struct PopulationEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::Dse;
};

// n1p * np1 / n11. Throws std::domain_error when n11 == 0.
PopulationEstimate dse(const DualCounts& counts);

// Same, then floored to an integer value.
PopulationEstimate dse_floor(const DualCounts& counts);

// n1p * np1 / (n11 + direction*eps): the estimator under a net linkage
// error of eps erroneous matched cases. direction is +1 (net false
// positives) or -1 (net false negatives).
PopulationEstimate dse_with_error(const DualCounts& counts, double eps,
                                  int direction);

// 1 / p_hat, the linkage-free estimator.
PopulationEstimate lfdse(double p_hat);

// Estimated matched-pair total p_hat * omega, and its per-pattern
// decomposition p_hat * m_pattern * omega.
double estimated_matches(double p_hat, std::uint64_t omega);
double estimated_matches_for_pattern(double p_hat, std::span<const double> m,
                                     const ComparisonPattern& pattern,
                                     std::uint64_t omega);

struct NetError {
  double eps = 0.0;      // |#FP - #FN| equivalent count
  double eps_pct = 0.0;  // eps as % of the expected number of matches
};

// Back-calculates the net linkage error that would make a DSE carrying
// that error as inaccurate (in RRMSE) as the linkage-free estimator.
// rrmse_lfdse is a fraction (not %), var_dse is the absolute variance of
// the perfect-linkage DSE. Throws std::domain_error when
// (rrmse_lfdse*N)^2 < var_dse (the linkage-free arm did better).
NetError net_error_epsilon(double rrmse_lfdse, double var_dse, std::uint64_t N,
                           double p1, double p2);

struct Metrics {
  double rb = 0.0;     // relative bias
  double rse = 0.0;    // relative standard error
  double rrmse = 0.0;  // relative root mean square error
};

// Standard normal quantile (Acklam's rational approximation, |err| < 1e-8).
double normal_quantile(double p);

// Monte Carlo quality measures against the true size N. Uses the
// population variance (divide by n); rrmse^2 == rse^2 + rb^2.
Metrics metrics(std::span<const double> estimates, std::uint64_t N);

}  // namespace lfdse
