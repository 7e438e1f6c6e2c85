#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lfdse/bootstrap.hpp"

using namespace lfdse;

namespace {

// A dataset plus fit shaped like a real analysis: scenario-style capture
// with well-separated linkage variables.
struct Fixture {
  CaptureDraw draw;
  PatternCounts counts;
  EmFit fit;
};

Fixture make_fixture(std::uint64_t seed) {
  PhiloxStream rng(seed, 0, 0);
  Fixture f;
  f.draw = generate_capture(1000, 0.7, 0.7, rng);
  const std::vector<double> m{0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  const std::vector<double> u{0.001, 0.01, 0.05, 0.1, 0.15, 0.2};
  f.counts = generate_patterns(f.draw, m, u, rng);
  f.fit = fit_em(f.counts);
  return f;
}

}  // namespace

TEST_CASE("bootstrap_draw conserves pattern totals") {
  const Fixture f = make_fixture(21);
  const double n_l_hat = lfdse::lfdse(f.fit.params.p).value;
  for (int b = 0; b < 20; ++b) {
    PhiloxStream rng(77, 1, static_cast<std::uint64_t>(b));
    const BootstrapDraw d = bootstrap_draw(n_l_hat, f.draw.counts.n1p,
                                           f.draw.counts.np1, f.fit.params,
                                           rng);
    CHECK(d.patterns.total() == d.counts.omega());
    CHECK(d.counts.n11 <= std::min(d.counts.n1p, d.counts.np1));
  }
}

TEST_CASE("step-3 cell probabilities always sum to one") {
  // The inclusion cells are formed inside bootstrap_draw; their sum being
  // one is equivalent to the drawn table having total round(n_l_hat).
  const Fixture f = make_fixture(22);
  const double n_l_hat = lfdse::lfdse(f.fit.params.p).value;
  PhiloxStream rng(5, 2, 3);
  const BootstrapDraw d = bootstrap_draw(n_l_hat, f.draw.counts.n1p,
                                         f.draw.counts.np1, f.fit.params, rng);
  const double p1 = static_cast<double>(f.draw.counts.n1p) / n_l_hat;
  const double p2 = static_cast<double>(f.draw.counts.np1) / n_l_hat;
  const double sum = p1 * p2 + p1 * (1 - p2) + (1 - p1) * p2 +
                     (1 - p1) * (1 - p2);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.counts.n1p <= static_cast<std::uint64_t>(std::llround(n_l_hat)));
}

TEST_CASE("two replicates with a fixed seed are reproducible") {
  const Fixture f = make_fixture(23);
  BootstrapConfig config;
  config.replicates = 2;
  config.seed = 31;
  const BootstrapResult a = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, config, 1);
  const BootstrapResult b = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, config, 1);
  REQUIRE(a.replicate_values.size() == 2);
  CHECK(a.replicate_values == b.replicate_values);
  CHECK(a.se == b.se);
  CHECK(a.ci_low <= a.ci_high);
}

TEST_CASE("thread count never changes the bootstrap result") {
  const Fixture f = make_fixture(29);
  BootstrapConfig config;
  config.replicates = 60;
  config.seed = 8;
  const BootstrapResult one = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, config, 1);
  const BootstrapResult four = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, config, 4);
  CHECK(one.replicate_values == four.replicate_values);
  CHECK(one.se == four.se);
}

TEST_CASE("near-degenerate linkage reduces to the binomial table noise") {
  // Perfectly separated patterns pin the resampled match count, so the
  // replicate spread must approach the analytic relative error of the
  // ratio estimator, sqrt((1-p1)(1-p2)/(N p1 p2)).
  const std::uint64_t N = 1000;
  const double p1 = 0.7, p2 = 0.7;
  const auto n1p = static_cast<std::uint64_t>(N * p1);
  const auto np1 = static_cast<std::uint64_t>(N * p2);
  const std::uint64_t n11 = 490;
  const std::uint64_t omega = n1p * np1;

  // Matches agree everywhere, non-matches nowhere.
  const auto counts = PatternCounts::from_cells(
      6, {{0b111111, n11}, {0, omega - n11}});
  const EmFit fit = fit_em(counts);
  REQUIRE(fit.params.p ==
          doctest::Approx(static_cast<double>(n11) /
                          static_cast<double>(omega))
              .epsilon(1e-6));

  BootstrapConfig boot;
  boot.replicates = 400;
  boot.seed = 13;
  const BootstrapResult result =
      bootstrap_variance(counts, n1p, np1, fit, boot, 1);

  const double analytic_rse =
      std::sqrt((1 - p1) * (1 - p2) / (static_cast<double>(N) * p1 * p2)) *
      100.0;
  CHECK(result.rse == doctest::Approx(analytic_rse).epsilon(0.15));
}

TEST_CASE("doubling the replicates leaves the spread stable") {
  const Fixture f = make_fixture(37);
  BootstrapConfig small;
  small.replicates = 300;
  small.seed = 99;
  BootstrapConfig big = small;
  big.replicates = 600;
  const BootstrapResult a = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, small, 1);
  const BootstrapResult b = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, big, 1);
  CHECK(std::abs(a.se - b.se) <
        3.0 * a.se / std::sqrt(2.0 * static_cast<double>(small.replicates)));
}

TEST_CASE("the interval is centred on the point estimate") {
  const Fixture f = make_fixture(41);
  BootstrapConfig config;
  config.replicates = 300;
  config.seed = 3;
  const BootstrapResult result = bootstrap_variance(
      f.counts, f.draw.counts.n1p, f.draw.counts.np1, f.fit, config, 1);
  const double point = lfdse::lfdse(f.fit.params.p).value;
  CHECK(result.ci_low < point);
  CHECK(point < result.ci_high);
  CHECK(result.ci_high - point == doctest::Approx(point - result.ci_low));
  CHECK(result.ci_high - result.ci_low ==
        doctest::Approx(2.0 * 1.959963985 * result.se).epsilon(1e-6));
  CHECK(result.degenerate_count + result.replicate_values.size() ==
        config.replicates);
}

TEST_CASE("inconsistent marginals are rejected") {
  const Fixture f = make_fixture(43);
  BootstrapConfig config;
  config.replicates = 10;
  CHECK_THROWS_AS(
      bootstrap_variance(f.counts, f.draw.counts.n1p + 1, f.draw.counts.np1,
                         f.fit, config, 1),
      std::invalid_argument);

  // Marginal count above the population estimate -> probability > 1.
  EmFit bad = f.fit;
  bad.params.p = 0.9;  // n_l_hat ~ 1.1, far below the marginals
  CHECK_THROWS_AS(
      bootstrap_variance(f.counts, f.draw.counts.n1p, f.draw.counts.np1, bad,
                         config, 1),
      std::invalid_argument);
}

TEST_CASE("config validation") {
  BootstrapConfig config;
  config.replicates = 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.replicates = 100;
  config.ci_level = 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("coverage_experiment on a tiny grid cell") {
  Scenario s;
  s.id = 58;
  s.N = 150;
  s.p1 = 0.7;
  s.p2 = 0.7;
  s.m = std::vector<double>(6, 0.9);
  s.u = std::vector<double>(6, 0.005);
  s.reps = 1;
  s.seed = 4;
  BootstrapConfig config;
  config.replicates = 120;
  config.seed = 4;
  const CoverageResult r = coverage_experiment(s, 40, config, 2);
  CHECK(r.datasets_used + r.datasets_excluded == 40);
  CHECK(r.datasets_used > 30);
  CHECK(r.coverage_pct >= 80.0);   // loose: 40 datasets, nominal 95
  CHECK(r.coverage_pct <= 100.0);
  CHECK(r.rse_sim > 0.0);
  CHECK(r.mean_rse_boot > 0.0);
}
