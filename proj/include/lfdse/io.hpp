#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lfdse/bootstrap.hpp"
#include "lfdse/em.hpp"
#include "lfdse/simulate.hpp"

namespace lfdse {

// Pattern-count files: one "b1,b2,...,bk,count" line per distinct
// pattern; '#' starts a comment, blank lines are ignored. Parse errors
// carry the 1-based line number.
PatternCounts read_pattern_counts(std::istream& in);
PatternCounts read_pattern_counts_file(const std::string& path);
void write_pattern_counts(std::ostream& out, const PatternCounts& counts);

// Scenario config files, a small TOML subset: one [[scenario]] table per
// scenario with keys id, N, p1, p2, m, u, reps, seed; m and u are float
// arrays like [0.7, 0.8]. Values written by write_scenarios parse back
// bit-exactly.
std::vector<Scenario> read_scenarios(std::istream& in);
std::vector<Scenario> read_scenarios_file(const std::string& path);
void write_scenarios(std::ostream& out, const std::vector<Scenario>& list);

// Simulation results CSV; percentages and the net error get two decimal
// places, the m/u vectors are ';'-joined.
extern const char* const kMetricsCsvHeader;
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

// Flat "key = value" report for a mixture fit; extra context keys
// (marginal counts, implied estimates) are appended when available.
struct EstimateReport {
  EmFit fit;
  std::uint64_t n1 = 0;  // 0 = not provided
  std::uint64_t n2 = 0;
};
void write_fit_report(std::ostream& out, const EstimateReport& report);

// Reads p_hat and the m_i/u_i vectors back out of a fit report.
LinkageParams read_params_report(std::istream& in);
LinkageParams read_params_report_file(const std::string& path);

void write_bootstrap_report(std::ostream& out, double n_l_hat,
                            const BootstrapResult& result,
                            const BootstrapConfig& config);

// One CSV row of a coverage experiment (with header line).
void write_coverage_csv(std::ostream& out, const Scenario& scenario,
                        const CoverageResult& result);

std::string format_prob_vector(std::span<const double> values);  // ';'-joined

}  // namespace lfdse
