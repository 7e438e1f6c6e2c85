#include "lfdse/linkage_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lfdse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(std::size_t k) {
  if (k < 1 || k > static_cast<std::size_t>(kMaxPatternVars))
    throw std::invalid_argument("probability vector length must be in [1, " +
                                std::to_string(kMaxPatternVars) + "]");
}

double log_weight_of_code(std::span<const double> m, std::span<const double> u,
                          std::uint32_t code, int k) {
  double lw = 0.0;
  for (int v = 0; v < k; ++v) {
    const bool bit = (code >> (k - 1 - v)) & 1u;
    const double mv = clamp_prob(m[static_cast<std::size_t>(v)]);
    const double uv = clamp_prob(u[static_cast<std::size_t>(v)]);
    lw += bit ? std::log(mv) - std::log(uv)
              : std::log(1.0 - mv) - std::log(1.0 - uv);
  }
  return lw;
}

}  // namespace

double clamp_prob(double p, double eps) {
  if (std::isnan(p)) throw std::invalid_argument("probability is NaN");
  return std::min(std::max(p, eps), 1.0 - eps);
}

void LinkageParams::validate() const {
  if (m.size() != u.size())
    throw std::invalid_argument("m and u must have equal length");
  check_k(m.size());
  auto check01 = [](double v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("probability outside [0, 1]");
  };
  for (double v : m) check01(v);
  for (double v : u) check01(v);
  check01(p);
}

LinkageParams LinkageParams::clamped(double eps) const {
  LinkageParams out = *this;
  for (double& v : out.m) v = clamp_prob(v, eps);
  for (double& v : out.u) v = clamp_prob(v, eps);
  out.p = clamp_prob(out.p, eps);
  return out;
}

double joint_prob(std::span<const double> probs,
                  const ComparisonPattern& pattern) {
  if (probs.size() != static_cast<std::size_t>(pattern.k()))
    throw std::invalid_argument(
        "joint_prob: probability vector length does not match pattern");
  double prod = 1.0;
  for (int v = 0; v < pattern.k(); ++v) {
    const double pv = clamp_prob(probs[static_cast<std::size_t>(v)]);
    prod *= pattern.bit(v) ? pv : 1.0 - pv;
  }
  return prod;
}

double log_joint_prob(std::span<const double> probs,
                      const ComparisonPattern& pattern) {
  if (probs.size() != static_cast<std::size_t>(pattern.k()))
    throw std::invalid_argument(
        "log_joint_prob: probability vector length does not match pattern");
  double sum = 0.0;
  for (int v = 0; v < pattern.k(); ++v) {
    const double pv = clamp_prob(probs[static_cast<std::size_t>(v)]);
    sum += std::log(pattern.bit(v) ? pv : 1.0 - pv);
  }
  return sum;
}

std::vector<double> joint_prob_table(std::span<const double> probs, int k) {
  if (probs.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("joint_prob_table: length mismatch");
  check_k(probs.size());
  std::vector<double> table{1.0};
  table.reserve(std::size_t{1} << k);
  for (int v = 0; v < k; ++v) {
    const double pv = clamp_prob(probs[static_cast<std::size_t>(v)]);
    std::vector<double> next(table.size() * 2);
    for (std::size_t i = 0; i < table.size(); ++i) {
      next[2 * i] = table[i] * (1.0 - pv);
      next[2 * i + 1] = table[i] * pv;
    }
    table = std::move(next);
  }
  return table;
}

double match_weight(const LinkageParams& params,
                    const ComparisonPattern& pattern) {
  return std::exp(log_match_weight(params, pattern));
}

double log_match_weight(const LinkageParams& params,
                        const ComparisonPattern& pattern) {
  if (params.m.size() != params.u.size() ||
      params.m.size() != static_cast<std::size_t>(pattern.k()))
    throw std::invalid_argument("log_match_weight: length mismatch");
  return log_weight_of_code(params.m, params.u, pattern.code(), pattern.k());
}

const char* to_string(LinkDecision d) {
  switch (d) {
    case LinkDecision::Link:
      return "link";
    case LinkDecision::PossibleLink:
      return "possible_link";
    case LinkDecision::NonLink:
      return "non_link";
  }
  return "?";
}

double DecisionThresholds::t_mu() const { return std::exp(log_t_mu); }
double DecisionThresholds::t_lambda() const { return std::exp(log_t_lambda); }

DecisionThresholds derive_thresholds(const LinkageParams& params, double mu,
                                     double lambda) {
  params.validate();
  if (!(mu > 0.0 && mu < 1.0) || !(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("error levels must be in (0, 1)");

  const int k = params.k();
  const std::size_t n_patterns = std::size_t{1} << k;
  const std::vector<double> m_joint = joint_prob_table(params.m, k);
  const std::vector<double> u_joint = joint_prob_table(params.u, k);

  std::vector<double> log_w(n_patterns);
  for (std::size_t c = 0; c < n_patterns; ++c)
    log_w[c] = log_weight_of_code(params.m, params.u,
                                  static_cast<std::uint32_t>(c), k);

  std::vector<std::uint32_t> order(n_patterns);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (log_w[a] != log_w[b]) return log_w[a] > log_w[b];
    return a < b;  // deterministic tie-break
  });

  // Index conditions on the sorted list: n = first position where the
  // cumulative u-mass reaches mu, n' = last position whose suffix m-mass
  // still reaches lambda. Admissible pairs need n < n'.
  std::size_t fs_n = n_patterns;
  double cum_u = 0.0;
  for (std::size_t i = 0; i < n_patterns; ++i) {
    cum_u += u_joint[order[i]];
    if (cum_u >= mu - kErrorLevelSlack) {
      fs_n = i;
      break;
    }
  }
  std::size_t fs_np = 0;
  double cum_m = 0.0;
  for (std::size_t i = n_patterns; i-- > 0;) {
    cum_m += m_joint[order[i]];
    if (cum_m >= lambda - kErrorLevelSlack) {
      fs_np = i;
      break;
    }
  }
  if (fs_n >= fs_np)
    throw std::domain_error("inadmissible error levels (mu, lambda): "
                            "threshold indices cross");

  // Walk tied-weight blocks from the top; link whole blocks while the
  // cumulative u-mass stays under mu.
  std::size_t link_end = 0;  // one past the last linked position
  cum_u = 0.0;
  for (std::size_t i = 0; i < n_patterns;) {
    std::size_t j = i;
    double block_u = 0.0;
    while (j < n_patterns && log_w[order[j]] == log_w[order[i]])
      block_u += u_joint[order[j++]];
    if (cum_u + block_u > mu + kErrorLevelSlack) break;
    cum_u += block_u;
    link_end = j;
    i = j;
  }

  // Same from the bottom for the non-link side against lambda.
  std::size_t nonlink_begin = n_patterns;
  cum_m = 0.0;
  for (std::size_t i = n_patterns; i > 0;) {
    std::size_t j = i;
    double block_m = 0.0;
    while (j > 0 && log_w[order[j - 1]] == log_w[order[i - 1]])
      block_m += m_joint[order[--j]];
    if (cum_m + block_m > lambda + kErrorLevelSlack) break;
    cum_m += block_m;
    nonlink_begin = j;
    i = j;
  }

  if (link_end > nonlink_begin)
    throw std::domain_error("inadmissible error levels (mu, lambda): "
                            "link and non-link sets overlap");

  DecisionThresholds out;
  out.log_t_mu = link_end > 0 ? log_w[order[link_end - 1]] : kInf;
  out.log_t_lambda = nonlink_begin < n_patterns ? log_w[order[nonlink_begin]]
                                                : -kInf;
  out.ordering = std::move(order);
  return out;
}

LinkDecision classify(double weight, const DecisionThresholds& thresholds) {
  if (!(weight > 0.0))
    throw std::invalid_argument("classify: weight must be positive");
  return classify_log(std::log(weight), thresholds);
}

LinkDecision classify_log(double log_weight,
                          const DecisionThresholds& thresholds) {
  if (log_weight >= thresholds.log_t_mu) return LinkDecision::Link;
  if (log_weight <= thresholds.log_t_lambda) return LinkDecision::NonLink;
  return LinkDecision::PossibleLink;
}

}  // namespace lfdse
