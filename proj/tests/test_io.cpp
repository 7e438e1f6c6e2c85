#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "lfdse/io.hpp"

using namespace lfdse;

TEST_CASE("pattern-count files round trip") {
  const std::string text =
      "# survey pairs\n"
      "1,0,1,4\n"
      "\n"
      "0,0,0,10   # mostly disagreement\n"
      "1,1,1,2\n";
  std::istringstream in(text);
  const PatternCounts counts = read_pattern_counts(in);
  CHECK(counts.k() == 3);
  CHECK(counts.total() == 16);
  CHECK(counts.count_of(ComparisonPattern({1, 0, 1})) == 4);

  std::ostringstream out;
  write_pattern_counts(out, counts);
  std::istringstream back(out.str());
  const PatternCounts again = read_pattern_counts(back);
  CHECK(again.total() == counts.total());
  CHECK(again.count_of(ComparisonPattern({0, 0, 0})) == 10);
}

TEST_CASE("pattern-count parse errors carry line numbers") {
  std::istringstream missing_count("1\n");
  CHECK_THROWS_WITH_AS(read_pattern_counts(missing_count),
                       doctest::Contains("line 1"), std::invalid_argument);

  std::istringstream changed_k("1,0,3\n1,0,1,2\n");
  CHECK_THROWS_WITH_AS(read_pattern_counts(changed_k),
                       doctest::Contains("line 2"), std::invalid_argument);

  std::istringstream bad_count("1,0,x\n");
  CHECK_THROWS_AS(read_pattern_counts(bad_count), std::invalid_argument);

  std::istringstream empty("# nothing\n\n");
  CHECK_THROWS_AS(read_pattern_counts(empty), std::invalid_argument);
}

TEST_CASE("scenario files round trip to identical scenarios") {
  std::vector<Scenario> list;
  Scenario a;
  a.id = 1;
  a.N = 1000;
  a.p1 = 0.5;
  a.p2 = 0.7;
  a.m = {0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  a.u = {0.001, 0.01, 0.05, 0.1, 0.15, 0.2};
  a.reps = 10000;
  a.seed = 42;
  Scenario b;
  b.id = 2;
  b.N = 150;
  b.p1 = 1.0 / 3.0;  // not exactly representable in decimal
  b.p2 = 0.9;
  b.m = {0.9, 0.9};
  b.u = {0.005, 0.125};
  b.reps = 77;
  b.seed = 123456789012345ULL;
  list.push_back(a);
  list.push_back(b);

  std::ostringstream out;
  write_scenarios(out, list);
  std::istringstream in(out.str());
  const auto parsed = read_scenarios(in);
  REQUIRE(parsed.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(parsed[i].id == list[i].id);
    CHECK(parsed[i].N == list[i].N);
    CHECK(parsed[i].p1 == list[i].p1);  // bit-exact round trip
    CHECK(parsed[i].p2 == list[i].p2);
    CHECK(parsed[i].m == list[i].m);
    CHECK(parsed[i].u == list[i].u);
    CHECK(parsed[i].reps == list[i].reps);
    CHECK(parsed[i].seed == list[i].seed);
  }
}

TEST_CASE("scenario parser reports the offending line") {
  const std::string text =
      "[[scenario]]\n"
      "id = 1\n"
      "N = 1000\n"
      "p1 = high\n";
  std::istringstream in(text);
  CHECK_THROWS_WITH_AS(read_scenarios(in), doctest::Contains("line 4"),
                       std::invalid_argument);

  std::istringstream stray("id = 1\n");
  CHECK_THROWS_WITH_AS(read_scenarios(stray),
                       doctest::Contains("outside of a [[scenario]]"),
                       std::invalid_argument);

  std::istringstream none("# empty\n");
  CHECK_THROWS_AS(read_scenarios(none), std::invalid_argument);
}

TEST_CASE("metrics CSV has a fixed column layout") {
  MetricsRow row;
  row.id = 57;
  row.N = 1000;
  row.p1 = 0.7;
  row.p2 = 0.7;
  row.m = std::vector<double>(6, 0.9);
  row.u = std::vector<double>(6, 0.005);
  row.rb_dse = 0.02;
  row.rb_lfdse = 0.0178;
  row.rse_dse = 1.361;
  row.rse_lfdse = 1.384;
  row.rrmse_dse = 1.362;
  row.rrmse_lfdse = 1.386;
  row.se_ratio = 1.0169;
  row.eps = 1.308;
  row.eps_pct = 0.267;
  row.reps_used = 10000;
  row.failures = 0;

  std::ostringstream out;
  write_metrics_csv(out, {row});
  std::istringstream lines(out.str());
  std::string header, data;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, data));
  CHECK(header == std::string(kMetricsCsvHeader));
  CHECK(std::count(header.begin(), header.end(), ',') == 15);
  CHECK(std::count(data.begin(), data.end(), ',') == 15);
  CHECK(data ==
        "57,1000,0.7,0.7,0.9;0.9;0.9;0.9;0.9;0.9,"
        "0.005;0.005;0.005;0.005;0.005;0.005,"
        "0.02,0.02,1.36,1.38,1.36,1.39,1.02,1.31,0.27,0");
}

TEST_CASE("fit reports round trip through the parameter parser") {
  EstimateReport report;
  report.fit.params.m = {0.9, 0.8, 0.7};
  report.fit.params.u = {0.1, 0.2, 0.3};
  report.fit.params.p = 0.0030517578125;  // dyadic, exact in decimal
  report.fit.iterations = 55;
  report.fit.converged = true;
  report.fit.loglik_trace = {-10.0, -9.5};
  report.n1 = 700;
  report.n2 = 900;

  std::ostringstream out;
  write_fit_report(out, report);
  const std::string text = out.str();
  CHECK(text.find("p_hat = ") != std::string::npos);
  CHECK(text.find("m_1 = 0.9") != std::string::npos);
  CHECK(text.find("u_3 = 0.3") != std::string::npos);
  CHECK(text.find("converged = 1") != std::string::npos);
  CHECK(text.find("omega = 630000") != std::string::npos);

  std::istringstream in(text);
  const LinkageParams params = read_params_report(in);
  CHECK(params.p == report.fit.params.p);
  CHECK(params.m == report.fit.params.m);
  CHECK(params.u == report.fit.params.u);
}

TEST_CASE("parameter parser rejects incomplete reports") {
  std::istringstream no_p("m_1 = 0.9\nu_1 = 0.1\n");
  CHECK_THROWS_AS(read_params_report(no_p), std::invalid_argument);

  std::istringstream gap("p_hat = 0.1\nm_1 = 0.9\nm_3 = 0.8\nu_1 = 0.1\n");
  CHECK_THROWS_AS(read_params_report(gap), std::invalid_argument);

  std::istringstream k_clash("k = 2\np_hat = 0.1\nm_1 = 0.9\nu_1 = 0.1\n");
  CHECK_THROWS_AS(read_params_report(k_clash), std::invalid_argument);
}

TEST_CASE("bootstrap and coverage writers emit the documented keys") {
  BootstrapResult result;
  result.se = 22.5;
  result.rse = 2.26;
  result.ci_low = 950.0;
  result.ci_high = 1050.0;
  result.replicate_values = {990.0, 1010.0};
  result.degenerate_count = 3;
  BootstrapConfig config;
  config.replicates = 1000;
  config.ci_level = 0.95;

  std::ostringstream out;
  write_bootstrap_report(out, 1000.0, result, config);
  const std::string text = out.str();
  for (const char* key :
       {"N_L_hat = ", "se = ", "rse_pct = ", "ci_low = ", "ci_high = ",
        "replicates = 1000", "degenerate_count = 3"})
    CHECK(text.find(key) != std::string::npos);

  Scenario s;
  s.id = 9;
  s.N = 1000;
  s.p1 = 0.7;
  s.p2 = 0.9;
  s.m = std::vector<double>(6, 0.9);
  s.u = std::vector<double>(6, 0.005);
  s.reps = 1;
  s.seed = 1;
  CoverageResult cov;
  cov.rse_sim = 2.28;
  cov.mean_rse_boot = 2.26;
  cov.coverage_pct = 94.8;
  std::ostringstream cov_out;
  write_coverage_csv(cov_out, s, cov);
  std::istringstream cov_lines(cov_out.str());
  std::string header, data;
  REQUIRE(std::getline(cov_lines, header));
  REQUIRE(std::getline(cov_lines, data));
  CHECK(header == "N,p1,p2,m,u,rse_sim,rse_boot,coverage");
  CHECK(data.find("2.28,2.26,94.80") != std::string::npos);
}
