#include "lfdse/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

namespace lfdse {

namespace {

// Bootstrap streams live in their own half of the stream-id space so they
// can never collide with simulation replicate streams under a shared seed.
constexpr std::uint64_t kBootstrapDomain = std::uint64_t{1} << 63;

BootstrapResult bootstrap_impl(const PatternCounts& counts, std::uint64_t n1p,
                               std::uint64_t np1, const EmFit& fit,
                               const BootstrapConfig& config,
                               std::uint64_t stream_hi, unsigned threads) {
  config.validate();
  if (counts.empty())
    throw std::invalid_argument("bootstrap_variance: empty pattern counts");
  if (n1p * np1 != counts.total())
    throw std::invalid_argument(
        "bootstrap_variance: marginal counts inconsistent with the pattern "
        "total (n1p*np1 != |S|)");
  if (fit.params.k() != counts.k())
    throw std::invalid_argument("bootstrap_variance: fit does not match data");

  const double n_l_hat = lfdse(fit.params.p).value;
  const double p1_hat = static_cast<double>(n1p) / n_l_hat;
  const double pp1_hat = static_cast<double>(np1) / n_l_hat;
  if (!(p1_hat > 0.0 && p1_hat <= 1.0) || !(pp1_hat > 0.0 && pp1_hat <= 1.0))
    throw std::invalid_argument(
        "bootstrap_variance: estimated marginal probabilities outside (0, 1]");

  EmConfig refit = EmConfig::defaults(counts.k(), counts.total());
  refit.init = fit.params;  // warm start at the observed-data estimates

  std::vector<std::optional<double>> draws(config.replicates);
  auto worker = [&](std::uint32_t first, std::uint32_t last) {
    for (std::uint32_t b = first; b < last; ++b) {
      PhiloxStream rng(config.seed, stream_hi, std::uint64_t{b} + 1);
      const BootstrapDraw d =
          bootstrap_draw(n_l_hat, n1p, np1, fit.params, rng);
      if (d.counts.n11 == 0 || d.patterns.empty()) continue;
      const EmFit star = fit_em(d.patterns, refit);
      if (em_boundary_collapsed(star, refit.clamp)) continue;
      draws[b] = lfdse(star.params.p).value;
    }
  };
  if (threads <= 1 || config.replicates < 2) {
    worker(0, config.replicates);
  } else {
    const unsigned n_workers =
        std::min<unsigned>(threads, config.replicates);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    const std::uint32_t chunk =
        (config.replicates + n_workers - 1) / n_workers;
    for (unsigned t = 0; t < n_workers; ++t)
      pool.emplace_back(worker, t * chunk,
                        std::min<std::uint32_t>((t + 1) * chunk,
                                                config.replicates));
    for (auto& th : pool) th.join();
  }

  BootstrapResult out;
  out.replicate_values.reserve(config.replicates);
  for (const auto& d : draws) {
    if (d)
      out.replicate_values.push_back(*d);
    else
      ++out.degenerate_count;
  }
  if (out.replicate_values.size() < 2)
    throw std::domain_error(
        "bootstrap_variance: fewer than two usable replicates");

  double mean = 0.0;
  for (double v : out.replicate_values) mean += v;
  mean /= static_cast<double>(out.replicate_values.size());
  double var = 0.0;
  for (double v : out.replicate_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(out.replicate_values.size());
  out.se = std::sqrt(var);
  out.rse = out.se / n_l_hat * 100.0;

  const double z = normal_quantile(0.5 + config.ci_level / 2.0);
  out.ci_low = n_l_hat - z * out.se;
  out.ci_high = n_l_hat + z * out.se;
  return out;
}

}  // namespace

void BootstrapConfig::validate() const {
  if (replicates < 2)
    throw std::invalid_argument("BootstrapConfig: replicates must be >= 2");
  if (!(ci_level > 0.0 && ci_level < 1.0))
    throw std::invalid_argument("BootstrapConfig: ci_level must be in (0, 1)");
}

BootstrapDraw bootstrap_draw(double n_l_hat, std::uint64_t n1p,
                             std::uint64_t np1, const LinkageParams& params,
                             PhiloxStream& rng) {
  params.validate();
  if (!(n_l_hat > 0.0) || !std::isfinite(n_l_hat))
    throw std::invalid_argument("bootstrap_draw: bad population estimate");
  const double p1_hat = static_cast<double>(n1p) / n_l_hat;
  const double pp1_hat = static_cast<double>(np1) / n_l_hat;
  if (!(p1_hat > 0.0 && p1_hat <= 1.0) || !(pp1_hat > 0.0 && pp1_hat <= 1.0))
    throw std::invalid_argument(
        "bootstrap_draw: marginal probabilities outside (0, 1]");

  // Inclusion cells under independence; they sum to 1 by construction.
  const double cell[4] = {p1_hat * pp1_hat, p1_hat * (1.0 - pp1_hat),
                          (1.0 - p1_hat) * pp1_hat,
                          (1.0 - p1_hat) * (1.0 - pp1_hat)};
  const auto size = static_cast<std::uint64_t>(std::llround(n_l_hat));
  const auto table = multinomial_draw(size, cell, rng);

  BootstrapDraw out;
  out.counts.n11 = table[0];
  out.counts.n1p = table[0] + table[1];
  out.counts.np1 = table[0] + table[2];

  const int k = params.k();
  const std::uint64_t omega = out.counts.omega();
  const std::uint64_t n_match = out.counts.n11;
  std::vector<PatternCounts::Cell> cells;
  if (n_match > 0) {
    const auto mc =
        multinomial_draw(n_match, joint_prob_table(params.m, k), rng);
    for (std::uint32_t code = 0; code < mc.size(); ++code)
      if (mc[code] > 0) cells.push_back({code, mc[code]});
  }
  if (omega > n_match) {
    const auto uc = multinomial_draw(omega - n_match,
                                     joint_prob_table(params.u, k), rng);
    for (std::uint32_t code = 0; code < uc.size(); ++code)
      if (uc[code] > 0) cells.push_back({code, uc[code]});
  }
  out.patterns = PatternCounts::from_cells(k, std::move(cells));
  return out;
}

BootstrapResult bootstrap_variance(const PatternCounts& counts,
                                   std::uint64_t n1p, std::uint64_t np1,
                                   const EmFit& fit,
                                   const BootstrapConfig& config,
                                   unsigned threads) {
  return bootstrap_impl(counts, n1p, np1, fit, config, kBootstrapDomain,
                        threads);
}

CoverageResult coverage_experiment(const Scenario& scenario,
                                   std::uint64_t outer,
                                   const BootstrapConfig& config,
                                   unsigned threads) {
  scenario.validate();
  config.validate();
  if (outer < 1)
    throw std::invalid_argument("coverage_experiment: outer must be >= 1");

  struct DatasetOutcome {
    double n_l_hat = 0.0;
    double rse_boot = 0.0;
    bool covered = false;
  };
  std::vector<std::optional<DatasetOutcome>> outcomes(outer);

  auto run_dataset = [&](std::uint64_t i) {
    PhiloxStream data_rng(config.seed, i, 0);
    const CaptureDraw draw =
        generate_capture(scenario.N, scenario.p1, scenario.p2, data_rng);
    if (draw.counts.n11 == 0 || draw.omega == 0) return;
    const PatternCounts counts =
        generate_patterns(draw, scenario.m, scenario.u, data_rng);
    const EmConfig cfg = EmConfig::defaults(counts.k(), counts.total());
    const EmFit fit = fit_em(counts, cfg);
    if (em_boundary_collapsed(fit, cfg.clamp)) return;
    DatasetOutcome o;
    o.n_l_hat = lfdse(fit.params.p).value;
    BootstrapResult boot;
    try {
      boot = bootstrap_impl(counts, draw.counts.n1p, draw.counts.np1, fit,
                            config, kBootstrapDomain | i, 1);
    } catch (const std::exception&) {
      return;  // dataset excluded, counted below
    }
    o.rse_boot = boot.rse;
    const double n = static_cast<double>(scenario.N);
    o.covered = boot.ci_low <= n && n <= boot.ci_high;
    outcomes[i] = o;
  };

  if (threads <= 1 || outer < 2) {
    for (std::uint64_t i = 0; i < outer; ++i) run_dataset(i);
  } else {
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::uint64_t>(threads, outer));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    const std::uint64_t chunk = (outer + n_workers - 1) / n_workers;
    for (unsigned t = 0; t < n_workers; ++t)
      pool.emplace_back([&, t] {
        const std::uint64_t last =
            std::min<std::uint64_t>((t + 1) * chunk, outer);
        for (std::uint64_t i = t * chunk; i < last; ++i) run_dataset(i);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<double> estimates;
  estimates.reserve(outer);
  CoverageResult out;
  double rse_boot_sum = 0.0;
  std::uint64_t covered = 0;
  for (const auto& o : outcomes) {
    if (!o) {
      ++out.datasets_excluded;
      continue;
    }
    estimates.push_back(o->n_l_hat);
    rse_boot_sum += o->rse_boot;
    covered += o->covered ? 1 : 0;
  }
  out.datasets_used = estimates.size();
  if (out.datasets_used == 0)
    throw std::domain_error("coverage_experiment: every dataset was excluded");
  out.rse_sim = metrics(estimates, scenario.N).rse * 100.0;
  out.mean_rse_boot = rse_boot_sum / static_cast<double>(out.datasets_used);
  out.coverage_pct =
      static_cast<double>(covered) / static_cast<double>(out.datasets_used) *
      100.0;
  return out;
}

}  // namespace lfdse
