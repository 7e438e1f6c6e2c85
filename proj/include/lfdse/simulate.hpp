#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lfdse/em.hpp"
#include "lfdse/estimators.hpp"
#include "lfdse/rng.hpp"

namespace lfdse {

// One simulation cell of the Monte Carlo study.
struct Scenario {
  int id = 0;
  std::uint64_t N = 0;
  double p1 = 0.0;  // coverage probability of list 1
  double p2 = 0.0;
  std::vector<double> m;
  std::vector<double> u;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CaptureDraw {
  DualCounts counts;
  std::uint64_t omega = 0;  // n1p * np1
};

// Per-scenario results; rb/rse/rrmse/eps_pct are percentages.
struct MetricsRow {
  int id = 0;
  std::uint64_t N = 0;
  double p1 = 0.0, p2 = 0.0;
  std::vector<double> m, u;
  double rb_dse = 0.0, rb_lfdse = 0.0;
  double rse_dse = 0.0, rse_lfdse = 0.0;
  double rrmse_dse = 0.0, rrmse_lfdse = 0.0;
  double se_ratio = 0.0;
  double eps = 0.0, eps_pct = 0.0;
  std::uint64_t reps_used = 0;
  std::uint64_t failures = 0;
  std::uint64_t em_nonconverged = 0;  // diagnostic, kept out of the CSV
};

// Each of the N population elements enters list 1 with probability p1 and
// list 2 with probability p2, independently.
CaptureDraw generate_capture(std::uint64_t N, double p1, double p2,
                             PhiloxStream& rng);

// Comparison patterns for all omega pairs: n11 pattern draws from the
// joint m-distribution, omega - n11 from the joint u-distribution.
PatternCounts generate_patterns(const CaptureDraw& draw,
                                std::span<const double> m,
                                std::span<const double> u, PhiloxStream& rng);

struct ReplicateResult {
  std::optional<double> dse;    // empty when n11 = 0 or a list is empty
  std::optional<double> lfdse;  // empty when the pair set is empty or EM
                                // collapses onto a boundary
  bool em_converged = true;
};

// One replicate: capture draw, pattern generation, perfect-linkage DSE
// from the true n11, linkage-free estimate 1/p_hat from the mixture fit.
ReplicateResult run_replicate(const Scenario& scenario, PhiloxStream& rng);

// Runs scenario.reps replicates (replicate r draws from the stream
// (scenario.seed, scenario.id, r), so results do not depend on thread
// count) and aggregates both arms. Throws std::domain_error if every
// replicate failed.
MetricsRow run_scenario(const Scenario& scenario, unsigned threads = 1);

// Rows come back in input order. A scenario whose replicates all failed
// yields a row with reps_used = 0 and NaN metrics instead of aborting the
// suite.
std::vector<MetricsRow> run_suite(std::span<const Scenario> scenarios,
                                  unsigned threads = 1);

// The built-in 60-scenario study grid; every scenario gets the given
// replicate count and seed.
std::vector<Scenario> paper_scenarios(std::uint64_t reps, std::uint64_t seed);

}  // namespace lfdse
