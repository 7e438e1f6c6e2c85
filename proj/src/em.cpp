#include "lfdse/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lfdse {

namespace {

void check_counts_k(int k) {
  if (k < 1 || k > kMaxPatternVars)
    throw std::invalid_argument("pattern counts k must be in [1, " +
                                std::to_string(kMaxPatternVars) + "]");
}

// Joint class probabilities for one cell, by direct product over bits.
inline void cell_class_probs(std::uint32_t code, int k,
                             const std::vector<double>& m,
                             const std::vector<double>& u, double& m_prob,
                             double& u_prob) {
  double mp = 1.0, up = 1.0;
  for (int v = 0; v < k; ++v) {
    if ((code >> (k - 1 - v)) & 1u) {
      mp *= m[static_cast<std::size_t>(v)];
      up *= u[static_cast<std::size_t>(v)];
    } else {
      mp *= 1.0 - m[static_cast<std::size_t>(v)];
      up *= 1.0 - u[static_cast<std::size_t>(v)];
    }
  }
  m_prob = mp;
  u_prob = up;
}

// Fills g with the posterior match probabilities and returns the
// observed-data log-likelihood of `params` (the E-step denominator is the
// per-pattern mixture likelihood).
double e_step_into(const PatternCounts& counts, const LinkageParams& params,
                   std::span<double> g) {
  const int k = counts.k();
  const auto cells = counts.cells();
  double loglik = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double m_prob, u_prob;
    cell_class_probs(cells[i].code, k, params.m, params.u, m_prob, u_prob);
    const double num = params.p * m_prob;
    const double den = num + (1.0 - params.p) * u_prob;
    g[i] = num / den;
    loglik += static_cast<double>(cells[i].count) * std::log(den);
  }
  return loglik;
}

double max_param_change(const LinkageParams& a, const LinkageParams& b) {
  double d = std::abs(a.p - b.p);
  for (std::size_t v = 0; v < a.m.size(); ++v) {
    d = std::max(d, std::abs(a.m[v] - b.m[v]));
    d = std::max(d, std::abs(a.u[v] - b.u[v]));
  }
  return d;
}

}  // namespace

PatternCounts PatternCounts::from_cells(int k, std::vector<Cell> cells) {
  check_counts_k(k);
  const std::uint32_t limit = std::uint32_t{1} << k;
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.code < b.code; });
  PatternCounts out;
  out.k_ = k;
  for (const Cell& c : cells) {
    if (c.code >= limit)
      throw std::invalid_argument("pattern code out of range for k=" +
                                  std::to_string(k));
    if (c.count == 0) continue;
    if (!out.cells_.empty() && out.cells_.back().code == c.code)
      out.cells_.back().count += c.count;
    else
      out.cells_.push_back(c);
    out.total_ += c.count;
  }
  return out;
}

std::uint64_t PatternCounts::count_of(std::uint32_t code) const {
  const auto it = std::lower_bound(
      cells_.begin(), cells_.end(), code,
      [](const Cell& c, std::uint32_t v) { return c.code < v; });
  return (it != cells_.end() && it->code == code) ? it->count : 0;
}

std::uint64_t PatternCounts::count_of(const ComparisonPattern& pattern) const {
  if (pattern.k() != k_)
    throw std::invalid_argument("count_of: pattern length mismatch");
  return count_of(pattern.code());
}

PatternCounts aggregate_pairs(std::span<const ComparisonPattern> patterns) {
  if (patterns.empty()) return PatternCounts{};
  const int k = patterns.front().k();
  std::vector<PatternCounts::Cell> cells;
  cells.reserve(patterns.size());
  for (const auto& p : patterns) {
    if (p.k() != k)
      throw std::invalid_argument(
          "aggregate_pairs: patterns have mixed lengths");
    cells.push_back({p.code(), 1});
  }
  return PatternCounts::from_cells(k, std::move(cells));
}

EmConfig EmConfig::defaults(int k, std::uint64_t total) {
  check_counts_k(k);
  EmConfig cfg;
  cfg.init.m.assign(static_cast<std::size_t>(k), 0.9);
  cfg.init.u.assign(static_cast<std::size_t>(k), 0.1);
  cfg.init.p = total > 0
                   ? std::min(1.0 / std::sqrt(static_cast<double>(total)), 0.5)
                   : 0.5;
  return cfg;
}

void EmConfig::validate() const {
  init.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("EmConfig: tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("EmConfig: max_iter must be >= 1");
  if (!(clamp > 0.0 && clamp < 0.5))
    throw std::invalid_argument("EmConfig: clamp must be in (0, 0.5)");
}

std::vector<double> e_step(const PatternCounts& counts,
                           const LinkageParams& params) {
  if (params.k() != counts.k())
    throw std::invalid_argument("e_step: parameter length mismatch");
  params.validate();
  std::vector<double> g(counts.cells().size());
  e_step_into(counts, params.clamped(), g);
  return g;
}

LinkageParams m_step(const PatternCounts& counts,
                     std::span<const double> posterior, double clamp) {
  const auto cells = counts.cells();
  if (posterior.size() != cells.size())
    throw std::invalid_argument("m_step: posterior does not cover all cells");
  const int k = counts.k();
  check_counts_k(k);

  double sum_g = 0.0, sum_1mg = 0.0;
  std::vector<double> sum_g_bit(static_cast<std::size_t>(k), 0.0);
  std::vector<double> sum_1mg_bit(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double c = static_cast<double>(cells[i].count);
    const double g = posterior[i];
    sum_g += c * g;
    sum_1mg += c * (1.0 - g);
    for (int v = 0; v < k; ++v)
      if ((cells[i].code >> (k - 1 - v)) & 1u) {
        sum_g_bit[static_cast<std::size_t>(v)] += c * g;
        sum_1mg_bit[static_cast<std::size_t>(v)] += c * (1.0 - g);
      }
  }
  if (sum_g <= 0.0 && sum_1mg <= 0.0)
    throw std::domain_error("m_step: zero posterior mass in both components");

  // A component with no posterior mass has undefined rates; pin them at
  // the boundary clamp, matching where the clamped limit ends up.
  LinkageParams out;
  out.m.resize(static_cast<std::size_t>(k));
  out.u.resize(static_cast<std::size_t>(k));
  for (int v = 0; v < k; ++v) {
    const auto idx = static_cast<std::size_t>(v);
    out.m[idx] = sum_g > 0.0 ? clamp_prob(sum_g_bit[idx] / sum_g, clamp)
                             : clamp;
    out.u[idx] = sum_1mg > 0.0 ? clamp_prob(sum_1mg_bit[idx] / sum_1mg, clamp)
                               : clamp;
  }
  out.p = clamp_prob(sum_g / static_cast<double>(counts.total()), clamp);
  return out;
}

double log_likelihood(const PatternCounts& counts,
                      const LinkageParams& params) {
  if (counts.empty()) return 0.0;
  if (params.k() != counts.k())
    throw std::invalid_argument("log_likelihood: parameter length mismatch");
  const LinkageParams cp = params.clamped();
  double loglik = 0.0;
  for (const auto& cell : counts.cells()) {
    double m_prob, u_prob;
    cell_class_probs(cell.code, counts.k(), cp.m, cp.u, m_prob, u_prob);
    loglik += static_cast<double>(cell.count) *
              std::log(cp.p * m_prob + (1.0 - cp.p) * u_prob);
  }
  return loglik;
}

EmFit fit_em(const PatternCounts& counts, const EmConfig& config) {
  config.validate();
  if (counts.empty() || counts.total() == 0)
    throw std::invalid_argument("fit_em: empty pattern counts");
  if (config.init.k() != counts.k())
    throw std::invalid_argument("fit_em: init parameter length mismatch");

  LinkageParams params = config.init.clamped(config.clamp);
  EmFit fit;
  fit.loglik_trace.reserve(static_cast<std::size_t>(config.max_iter) + 1);
  std::vector<double> g(counts.cells().size());

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const double loglik_before = e_step_into(counts, params, g);
    fit.loglik_trace.push_back(loglik_before);
    LinkageParams next = m_step(counts, g, config.clamp);
    const double delta = max_param_change(params, next);
    params = std::move(next);
    fit.iterations = iter;
    if (delta < config.tol) {
      fit.converged = true;
      break;
    }
  }

  // Label identification: the match class is the high-agreement one.
  double sum_m = 0.0, sum_u = 0.0;
  for (std::size_t v = 0; v < params.m.size(); ++v) {
    sum_m += params.m[v];
    sum_u += params.u[v];
  }
  if (sum_m < sum_u) {
    std::swap(params.m, params.u);
    params.p = 1.0 - params.p;
    for (double& gi : g) gi = 1.0 - gi;
  }

  fit.loglik_trace.push_back(log_likelihood(counts, params));
  fit.params = std::move(params);
  fit.posterior = std::move(g);
  return fit;
}

EmFit fit_em(const PatternCounts& counts) {
  return fit_em(counts, EmConfig::defaults(counts.k(), counts.total()));
}

bool em_boundary_collapsed(const EmFit& fit, double clamp) {
  return fit.params.p <= 2.0 * clamp || fit.params.p >= 1.0 - 2.0 * clamp;
}

}  // namespace lfdse
