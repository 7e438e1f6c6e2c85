#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lfdse/pattern.hpp"

namespace lfdse {

// Probabilities are pulled this far inside (0,1) before any product or
// ratio is formed, so weights always have a nonzero denominator.
inline constexpr double kProbClamp = 1e-9;

// Absolute slack used when cumulative error mass is compared against the
// requested (mu, lambda) levels; absorbs float rounding in the sums.
inline constexpr double kErrorLevelSlack = 1e-9;

double clamp_prob(double p, double eps = kProbClamp);

// The two-component mixture parameters: per-variable agreement
// probabilities for matched (m) and unmatched (u) pairs, and the match
// proportion p among all pairs.
struct LinkageParams {
  std::vector<double> m;
  std::vector<double> u;
  double p = 0.5;

  int k() const { return static_cast<int>(m.size()); }
  void validate() const;
  LinkageParams clamped(double eps = kProbClamp) const;
};

// P(pattern) for one class: prod_v probs_v^{bit} (1-probs_v)^{1-bit}.
// Inputs are clamped, so the result is strictly positive.
double joint_prob(std::span<const double> probs,
                  const ComparisonPattern& pattern);
double log_joint_prob(std::span<const double> probs,
                      const ComparisonPattern& pattern);

// Joint probabilities for all 2^k patterns, indexed by pattern code.
std::vector<double> joint_prob_table(std::span<const double> probs, int k);

// Likelihood ratio m(pattern)/u(pattern). May overflow to +inf for large
// k with extreme probabilities; prefer log_match_weight for comparisons.
double match_weight(const LinkageParams& params,
                    const ComparisonPattern& pattern);
double log_match_weight(const LinkageParams& params,
                        const ComparisonPattern& pattern);

enum class LinkDecision { Link, PossibleLink, NonLink };

const char* to_string(LinkDecision d);

// Weight cutoffs for the three-way rule, plus the full pattern ordering
// (codes sorted by descending weight) they were derived from.
//
// log_t_mu is +inf when no pattern can be linked at level mu without
// overshooting it, and log_t_lambda is -inf in the symmetric case; the
// linear accessors then return +inf / 0.
struct DecisionThresholds {
  double log_t_mu = 0.0;
  double log_t_lambda = 0.0;
  std::vector<std::uint32_t> ordering;

  double t_mu() const;
  double t_lambda() const;
};

// Sorts patterns by descending weight and places the cutoffs so that the
// linked set's total u-probability stays <= mu and the non-linked set's
// total m-probability stays <= lambda. Tied weights move as a block: a
// block is linked (resp. non-linked) only if it fits entirely under the
// error level, otherwise the whole block stays a possible link. Throws
// std::domain_error when (mu, lambda) is inadmissible (the index
// conditions cross or the two sets would overlap).
DecisionThresholds derive_thresholds(const LinkageParams& params, double mu,
                                     double lambda);

// Link iff weight >= t_mu, non-link iff weight <= t_lambda (both bounds
// inclusive), possible link otherwise.
LinkDecision classify(double weight, const DecisionThresholds& thresholds);
LinkDecision classify_log(double log_weight,
                          const DecisionThresholds& thresholds);

}  // namespace lfdse
