#pragma once

#include <cstdint>
#include <vector>

#include "lfdse/em.hpp"
#include "lfdse/rng.hpp"
#include "lfdse/simulate.hpp"

namespace lfdse {

struct BootstrapConfig {
  std::uint32_t replicates = 1000;
  double ci_level = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BootstrapResult {
  double se = 0.0;       // standard deviation of the replicate estimates
  double rse = 0.0;      // se relative to the point estimate, in percent
  double ci_low = 0.0;   // normal interval: point estimate -/+ z * se
  double ci_high = 0.0;
  std::vector<double> replicate_values;
  std::uint64_t degenerate_count = 0;
};

// One parametric resample given the fitted model: a 2x2 inclusion table
// drawn over round(n_l_hat), then pattern draws for the implied match and
// non-match pair sets. Exposed for conservation checks; returns the
// resampled marginals alongside the pattern counts.
struct BootstrapDraw {
  DualCounts counts;
  PatternCounts patterns;
};
BootstrapDraw bootstrap_draw(double n_l_hat, std::uint64_t n1p,
                             std::uint64_t np1, const LinkageParams& params,
                             PhiloxStream& rng);

// Parametric bootstrap for the linkage-free estimator: re-estimates the
// inclusion table from n_l_hat = 1/p_hat and the observed marginals,
// resamples the table and the comparison patterns from the fitted
// (m, u), re-fits the mixture (warm-started at the fitted parameters) and
// records 1/p_hat* per replicate. Replicates with an empty resampled
// match set or a collapsed re-fit are excluded and counted.
BootstrapResult bootstrap_variance(const PatternCounts& counts,
                                   std::uint64_t n1p, std::uint64_t np1,
                                   const EmFit& fit,
                                   const BootstrapConfig& config,
                                   unsigned threads = 1);

struct CoverageResult {
  double rse_sim = 0.0;        // simulated RSE across the outer datasets, %
  double mean_rse_boot = 0.0;  // mean bootstrap RSE across datasets, %
  double coverage_pct = 0.0;   // share of CIs containing the true N, %
  std::uint64_t datasets_used = 0;
  std::uint64_t datasets_excluded = 0;
};

// Outer loop over `outer` simulated dataset pairs from the scenario: fit
// the mixture, bootstrap the variance, and record whether the interval
// covers the true N.
CoverageResult coverage_experiment(const Scenario& scenario,
                                   std::uint64_t outer,
                                   const BootstrapConfig& config,
                                   unsigned threads = 1);

}  // namespace lfdse
