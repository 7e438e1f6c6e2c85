#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "lfdse/bootstrap.hpp"
#include "lfdse/em.hpp"
#include "lfdse/io.hpp"
#include "lfdse/simulate.hpp"

namespace {

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Writes to the given path, or to stdout when the path is empty.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_simulate(const std::string& preset, const std::string& config_path,
                 std::uint64_t reps, bool reps_given, std::uint64_t seed,
                 bool seed_given, unsigned threads, const std::string& out) {
  std::vector<lfdse::Scenario> scenarios;
  if (!preset.empty()) {
    if (preset != "paper60")
      throw std::runtime_error("unknown preset '" + preset +
                               "' (available: paper60)");
    scenarios = lfdse::paper_scenarios(reps, seed);
  } else if (!config_path.empty()) {
    scenarios = lfdse::read_scenarios_file(config_path);
    for (auto& s : scenarios) {
      if (reps_given) s.reps = reps;
      if (seed_given) s.seed = seed;
    }
  } else {
    throw CLI::ValidationError("simulate",
                               "either --preset or --config is required");
  }

  const auto rows = lfdse::run_suite(scenarios, threads);
  OutputTarget target(out);
  lfdse::write_metrics_csv(target.stream(), rows);

  int failed = 0;
  for (const auto& row : rows)
    if (row.reps_used == 0) {
      std::cerr << "error: scenario " << row.id << ": all replicates failed\n";
      ++failed;
    }
  return failed == 0 ? 0 : 1;
}

lfdse::EmFit fit_counts_file(const std::string& counts_path, std::uint64_t n1,
                             std::uint64_t n2, lfdse::PatternCounts* counts_out) {
  const lfdse::PatternCounts counts =
      lfdse::read_pattern_counts_file(counts_path);
  if (n1 * n2 != counts.total()) {
    std::ostringstream msg;
    msg << "pattern counts sum to " << counts.total() << " but --n1 * --n2 = "
        << n1 * n2;
    throw std::runtime_error(msg.str());
  }
  const lfdse::EmConfig config =
      lfdse::EmConfig::defaults(counts.k(), counts.total());
  lfdse::EmFit fit = lfdse::fit_em(counts, config);
  if (lfdse::em_boundary_collapsed(fit, config.clamp))
    throw std::runtime_error(
        "mixture fit collapsed onto the boundary; the data carry no usable "
        "match signal");
  if (counts_out) *counts_out = counts;
  return fit;
}

int cmd_estimate(const std::string& counts_path, std::uint64_t n1,
                 std::uint64_t n2, const std::string& out) {
  lfdse::EstimateReport report;
  report.fit = fit_counts_file(counts_path, n1, n2, nullptr);
  report.n1 = n1;
  report.n2 = n2;
  OutputTarget target(out);
  lfdse::write_fit_report(target.stream(), report);
  return 0;
}

int cmd_bootstrap(const std::string& counts_path, std::uint64_t n1,
                  std::uint64_t n2, const lfdse::BootstrapConfig& config,
                  unsigned threads, const std::string& out) {
  config.validate();
  lfdse::PatternCounts counts;
  const lfdse::EmFit fit = fit_counts_file(counts_path, n1, n2, &counts);
  const lfdse::BootstrapResult result =
      lfdse::bootstrap_variance(counts, n1, n2, fit, config, threads);
  OutputTarget target(out);
  lfdse::write_bootstrap_report(target.stream(),
                                lfdse::lfdse(fit.params.p).value, result,
                                config);
  return 0;
}

int cmd_classify(const std::string& params_path, double mu, double lambda,
                 const std::string& out) {
  const lfdse::LinkageParams params =
      lfdse::read_params_report_file(params_path);
  const lfdse::DecisionThresholds thresholds =
      lfdse::derive_thresholds(params, mu, lambda);

  OutputTarget target(out);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(std::cin, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lfdse::ComparisonPattern pattern = lfdse::ComparisonPattern::parse(line);
    if (pattern.k() != params.k())
      throw std::runtime_error("stdin line " + std::to_string(line_no) +
                               ": pattern has " + std::to_string(pattern.k()) +
                               " fields, parameters have " +
                               std::to_string(params.k()));
    const double log_w = lfdse::log_match_weight(params, pattern);
    const lfdse::LinkDecision decision =
        lfdse::classify_log(log_w, thresholds);
    target.stream() << pattern.str() << ',' << std::exp(log_w) << ','
                    << lfdse::to_string(decision) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linkage-free dual system estimation toolkit"};
  app.require_subcommand(1);

  std::string preset, config_path, out_path, counts_path, params_path;
  std::uint64_t reps = 10000, seed = 42, n1 = 0, n2 = 0;
  unsigned threads = default_threads();
  lfdse::BootstrapConfig boot_config;
  boot_config.seed = 42;
  double mu = 0.0, lambda = 0.0;

  auto* simulate = app.add_subcommand(
      "simulate", "Run Monte Carlo scenarios and write a results CSV");
  simulate->add_option("--preset", preset,
                       "Built-in scenario set (paper60: the 60-cell grid)");
  simulate->add_option("--config", config_path, "Scenario config file");
  auto* reps_opt = simulate->add_option(
      "--reps", reps, "Replicates per scenario (default 10000)");
  auto* seed_opt =
      simulate->add_option("--seed", seed, "Master seed (default 42)");
  simulate->add_option("--threads", threads, "Worker threads");
  simulate->add_option("--out", out_path, "Output CSV path (default stdout)");

  auto* estimate = app.add_subcommand(
      "estimate", "Fit the mixture to a pattern-count file and report "
                  "parameters and the implied population size");
  estimate->add_option("counts", counts_path, "Pattern-count file")
      ->required();
  estimate->add_option("--n1", n1, "Size of list 1")->required();
  estimate->add_option("--n2", n2, "Size of list 2")->required();
  estimate->add_option("--out", out_path, "Output path (default stdout)");

  auto* bootstrap = app.add_subcommand(
      "bootstrap", "Parametric bootstrap variance for the estimate");
  bootstrap->add_option("counts", counts_path, "Pattern-count file")
      ->required();
  bootstrap->add_option("--n1", n1, "Size of list 1")->required();
  bootstrap->add_option("--n2", n2, "Size of list 2")->required();
  bootstrap->add_option("--replicates", boot_config.replicates,
                        "Bootstrap replicates (default 1000)");
  bootstrap->add_option("--ci", boot_config.ci_level,
                        "Confidence level (default 0.95)");
  bootstrap->add_option("--seed", boot_config.seed, "Seed (default 42)");
  bootstrap->add_option("--threads", threads, "Worker threads");
  bootstrap->add_option("--out", out_path, "Output path (default stdout)");

  auto* classify = app.add_subcommand(
      "classify", "Classify patterns from stdin with the three-way rule");
  classify->add_option("params", params_path, "Fitted-parameter report file")
      ->required();
  classify->add_option("--mu", mu, "Admissible false-positive level")
      ->required();
  classify->add_option("--lambda", lambda, "Admissible false-negative level")
      ->required();
  classify->add_option("--out", out_path, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(preset, config_path, reps, reps_opt->count() > 0,
                          seed, seed_opt->count() > 0, threads, out_path);
    if (estimate->parsed()) return cmd_estimate(counts_path, n1, n2, out_path);
    if (bootstrap->parsed())
      return cmd_bootstrap(counts_path, n1, n2, boot_config, threads,
                           out_path);
    if (classify->parsed())
      return cmd_classify(params_path, mu, lambda, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
