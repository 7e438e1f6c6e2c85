#include "lfdse/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace lfdse {

void DualCounts::validate() const {
  if (n11 > n1p || n11 > np1)
    throw std::invalid_argument(
        "DualCounts: n11 cannot exceed either marginal count");
}

PopulationEstimate dse(const DualCounts& counts) {
  counts.validate();
  if (counts.n11 == 0)
    throw std::domain_error("dse: no observed overlap (n11 = 0)");
  const double value = static_cast<double>(counts.n1p) *
                       static_cast<double>(counts.np1) /
                       static_cast<double>(counts.n11);
  return {value, EstimatorKind::Dse};
}

PopulationEstimate dse_floor(const DualCounts& counts) {
  return {std::floor(dse(counts).value), EstimatorKind::DseFloor};
}

PopulationEstimate dse_with_error(const DualCounts& counts, double eps,
                                  int direction) {
  counts.validate();
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("dse_with_error: direction must be +1 or -1");
  if (eps < 0.0)
    throw std::invalid_argument("dse_with_error: eps must be nonnegative");
  const double denom = static_cast<double>(counts.n11) + direction * eps;
  if (!(denom > 0.0))
    throw std::domain_error(
        "dse_with_error: adjusted match count is not positive");
  const double value = static_cast<double>(counts.n1p) *
                       static_cast<double>(counts.np1) / denom;
  return {value, EstimatorKind::DseEps};
}

PopulationEstimate lfdse(double p_hat) {
  if (!(p_hat > 0.0))
    throw std::domain_error("lfdse: p_hat must be positive");
  if (!(p_hat < 1.0))
    throw std::invalid_argument("lfdse: p_hat must be below 1");
  return {1.0 / p_hat, EstimatorKind::Lfdse};
}

double estimated_matches(double p_hat, std::uint64_t omega) {
  if (omega < 1)
    throw std::invalid_argument("estimated_matches: omega must be >= 1");
  return p_hat * static_cast<double>(omega);
}

double estimated_matches_for_pattern(double p_hat, std::span<const double> m,
                                     const ComparisonPattern& pattern,
                                     std::uint64_t omega) {
  if (omega < 1)
    throw std::invalid_argument("estimated_matches: omega must be >= 1");
  return p_hat * joint_prob(m, pattern) * static_cast<double>(omega);
}

NetError net_error_epsilon(double rrmse_lfdse, double var_dse, std::uint64_t N,
                           double p1, double p2) {
  if (N < 1) throw std::invalid_argument("net_error_epsilon: N must be >= 1");
  if (!(p1 > 0.0 && p1 <= 1.0 && p2 > 0.0 && p2 <= 1.0))
    throw std::invalid_argument(
        "net_error_epsilon: coverage probabilities must be in (0, 1]");
  if (var_dse < 0.0)
    throw std::invalid_argument("net_error_epsilon: variance must be >= 0");
  const double n = static_cast<double>(N);
  const double bracket = rrmse_lfdse * n * rrmse_lfdse * n - var_dse;
  if (bracket < 0.0)
    throw std::domain_error(
        "net_error_epsilon: linkage-free RRMSE below DSE standard error; "
        "net error is undefined");
  const double expected_cross = n * n * p1 * p2;  // E(n1+ n+1), independent lists
  const double expected_matches = n * p1 * p2;    // E(n11)
  NetError out;
  out.eps =
      std::abs(expected_cross / (n + std::sqrt(bracket)) - expected_matches);
  out.eps_pct = out.eps / expected_matches * 100.0;
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) return -normal_quantile(1.0 - p);
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

Metrics metrics(std::span<const double> estimates, std::uint64_t N) {
  if (estimates.empty())
    throw std::invalid_argument("metrics: empty estimate sequence");
  if (N < 1) throw std::invalid_argument("metrics: N must be >= 1");
  for (double e : estimates)
    if (!std::isfinite(e))
      throw std::invalid_argument("metrics: estimates must be finite");

  const double n = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= n;  // population variance over replicates

  const double size = static_cast<double>(N);
  Metrics out;
  out.rb = (mean - size) / size;
  out.rse = std::sqrt(var) / size;
  out.rrmse = std::sqrt(out.rse * out.rse + out.rb * out.rb);
  return out;
}

}  // namespace lfdse
