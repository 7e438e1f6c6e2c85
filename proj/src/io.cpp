#include "lfdse/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lfdse {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Strips comments and surrounding whitespace; empty result means skip.
std::string logical_line(const std::string& raw) {
  const auto hash = raw.find('#');
  return trim(hash == std::string::npos ? raw : raw.substr(0, hash));
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) parse_fail(line_no, "trailing junk in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(line_no, "expected a number, got '" + s + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line_no, "number out of range: '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    parse_fail(line_no, "expected a nonnegative integer, got '" + s + "'");
  return v;
}

std::vector<double> parse_double_array(const std::string& s,
                                       std::size_t line_no) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    parse_fail(line_no, "expected an array like [0.7, 0.8], got '" + s + "'");
  std::vector<double> out;
  std::istringstream in(s.substr(1, s.size() - 2));
  std::string field;
  while (std::getline(in, field, ',')) {
    field = trim(field);
    if (field.empty()) parse_fail(line_no, "empty array element");
    out.push_back(parse_double(field, line_no));
  }
  if (out.empty()) parse_fail(line_no, "empty array");
  return out;
}

// Shortest decimal form that reads back to the identical double.
std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  std::istringstream check(out.str());
  double back = 0.0;
  check >> back;
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      std::ostringstream shorter;
      shorter << std::setprecision(prec) << v;
      std::istringstream in(shorter.str());
      double b = 0.0;
      in >> b;
      if (b == v) return shorter.str();
    }
  }
  return out.str();
}

std::string format_fixed2(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

}  // namespace

std::string format_prob_vector(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

PatternCounts read_pattern_counts(std::istream& in) {
  std::vector<PatternCounts::Cell> cells;
  int k = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = logical_line(raw);
    if (line.empty()) continue;
    const auto last_comma = line.rfind(',');
    if (last_comma == std::string::npos)
      parse_fail(line_no, "expected 'b1,...,bk,count'");
    ComparisonPattern pattern{std::vector<std::uint8_t>{0}};
    try {
      pattern = ComparisonPattern::parse(line.substr(0, last_comma));
    } catch (const std::invalid_argument& e) {
      parse_fail(line_no, e.what());
    }
    if (k == 0)
      k = pattern.k();
    else if (pattern.k() != k)
      parse_fail(line_no, "pattern length changed from " + std::to_string(k) +
                              " to " + std::to_string(pattern.k()));
    const std::uint64_t count =
        parse_u64(trim(line.substr(last_comma + 1)), line_no);
    cells.push_back({pattern.code(), count});
  }
  if (k == 0) throw std::invalid_argument("pattern-count input is empty");
  return PatternCounts::from_cells(k, std::move(cells));
}

PatternCounts read_pattern_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_pattern_counts(in);
}

void write_pattern_counts(std::ostream& out, const PatternCounts& counts) {
  for (const auto& cell : counts.cells())
    out << ComparisonPattern::from_code(cell.code, counts.k()).str() << ','
        << cell.count << '\n';
}

std::vector<Scenario> read_scenarios(std::istream& in) {
  std::vector<Scenario> out;
  Scenario* current = nullptr;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = logical_line(raw);
    if (line.empty()) continue;
    if (line == "[[scenario]]") {
      out.emplace_back();
      current = &out.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      parse_fail(line_no, "expected 'key = value' or [[scenario]]");
    if (!current) parse_fail(line_no, "key outside of a [[scenario]] table");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "id")
      current->id = static_cast<int>(parse_u64(value, line_no));
    else if (key == "N")
      current->N = parse_u64(value, line_no);
    else if (key == "p1")
      current->p1 = parse_double(value, line_no);
    else if (key == "p2")
      current->p2 = parse_double(value, line_no);
    else if (key == "m")
      current->m = parse_double_array(value, line_no);
    else if (key == "u")
      current->u = parse_double_array(value, line_no);
    else if (key == "reps")
      current->reps = parse_u64(value, line_no);
    else if (key == "seed")
      current->seed = parse_u64(value, line_no);
    else
      parse_fail(line_no, "unknown key '" + key + "'");
  }
  if (out.empty())
    throw std::invalid_argument("scenario config contains no [[scenario]]");
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      out[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("scenario " + std::to_string(i + 1) + ": " +
                                  e.what());
    }
  }
  return out;
}

std::vector<Scenario> read_scenarios_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_scenarios(in);
}

void write_scenarios(std::ostream& out, const std::vector<Scenario>& list) {
  for (const Scenario& s : list) {
    out << "[[scenario]]\n";
    out << "id = " << s.id << '\n';
    out << "N = " << s.N << '\n';
    out << "p1 = " << format_double(s.p1) << '\n';
    out << "p2 = " << format_double(s.p2) << '\n';
    out << "m = [";
    for (std::size_t i = 0; i < s.m.size(); ++i)
      out << (i ? ", " : "") << format_double(s.m[i]);
    out << "]\n";
    out << "u = [";
    for (std::size_t i = 0; i < s.u.size(); ++i)
      out << (i ? ", " : "") << format_double(s.u[i]);
    out << "]\n";
    out << "reps = " << s.reps << '\n';
    out << "seed = " << s.seed << '\n';
    out << '\n';
  }
}

const char* const kMetricsCsvHeader =
    "id,N,p1,p2,m,u,rb_dse,rb_lfdse,rse_dse,rse_lfdse,rrmse_dse,rrmse_lfdse,"
    "ratio,eps,eps_pct,failures";

void write_metrics_csv(std::ostream& out,
                       const std::vector<MetricsRow>& rows) {
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.id << ',' << r.N << ',' << format_double(r.p1) << ','
        << format_double(r.p2) << ',' << format_prob_vector(r.m) << ','
        << format_prob_vector(r.u) << ',' << format_fixed2(r.rb_dse) << ','
        << format_fixed2(r.rb_lfdse) << ',' << format_fixed2(r.rse_dse) << ','
        << format_fixed2(r.rse_lfdse) << ',' << format_fixed2(r.rrmse_dse)
        << ',' << format_fixed2(r.rrmse_lfdse) << ','
        << format_fixed2(r.se_ratio) << ',' << format_fixed2(r.eps) << ','
        << format_fixed2(r.eps_pct) << ',' << r.failures << '\n';
  }
}

void write_fit_report(std::ostream& out, const EstimateReport& report) {
  const EmFit& fit = report.fit;
  const int k = fit.params.k();
  out << "k = " << k << '\n';
  out << "p_hat = " << format_double(fit.params.p) << '\n';
  for (int v = 0; v < k; ++v)
    out << "m_" << (v + 1) << " = "
        << format_double(fit.params.m[static_cast<std::size_t>(v)]) << '\n';
  for (int v = 0; v < k; ++v)
    out << "u_" << (v + 1) << " = "
        << format_double(fit.params.u[static_cast<std::size_t>(v)]) << '\n';
  out << "iterations = " << fit.iterations << '\n';
  out << "converged = " << (fit.converged ? 1 : 0) << '\n';
  out << "final_loglik = "
      << format_double(fit.loglik_trace.empty() ? 0.0
                                                : fit.loglik_trace.back())
      << '\n';
  if (report.n1 > 0 && report.n2 > 0) {
    const std::uint64_t omega = report.n1 * report.n2;
    out << "n1 = " << report.n1 << '\n';
    out << "n2 = " << report.n2 << '\n';
    out << "omega = " << omega << '\n';
    out << "n11_hat = " << format_double(estimated_matches(fit.params.p, omega))
        << '\n';
    out << "N_L_hat = " << format_double(lfdse(fit.params.p).value) << '\n';
  }
}

LinkageParams read_params_report(std::istream& in) {
  LinkageParams params;
  int k = 0;
  bool have_p = false;
  std::vector<double> m_vals, u_vals;
  std::vector<bool> m_seen, u_seen;
  std::string raw;
  std::size_t line_no = 0;
  auto store = [&](std::vector<double>& vals, std::vector<bool>& seen,
                   std::uint64_t idx, double v, std::size_t line) {
    if (idx < 1) parse_fail(line, "variable indices start at 1");
    if (vals.size() < idx) {
      vals.resize(idx);
      seen.resize(idx);
    }
    vals[idx - 1] = v;
    seen[idx - 1] = true;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = logical_line(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "k") {
      k = static_cast<int>(parse_u64(value, line_no));
    } else if (key == "p_hat") {
      params.p = parse_double(value, line_no);
      have_p = true;
    } else if (key.rfind("m_", 0) == 0) {
      store(m_vals, m_seen, parse_u64(key.substr(2), line_no),
            parse_double(value, line_no), line_no);
    } else if (key.rfind("u_", 0) == 0) {
      store(u_vals, u_seen, parse_u64(key.substr(2), line_no),
            parse_double(value, line_no), line_no);
    }
    // other keys (iterations, estimates, ...) are context, not parameters
  }
  if (!have_p || m_vals.empty() || m_vals.size() != u_vals.size())
    throw std::invalid_argument(
        "parameter report must provide p_hat and matching m_i/u_i vectors");
  for (std::size_t i = 0; i < m_vals.size(); ++i)
    if (!m_seen[i] || !u_seen[i])
      throw std::invalid_argument("parameter report: missing m_" +
                                  std::to_string(i + 1) + " or u_" +
                                  std::to_string(i + 1));
  if (k != 0 && static_cast<std::size_t>(k) != m_vals.size())
    throw std::invalid_argument("parameter report: k does not match the m_i");
  params.m = std::move(m_vals);
  params.u = std::move(u_vals);
  params.validate();
  return params;
}

LinkageParams read_params_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_params_report(in);
}

void write_bootstrap_report(std::ostream& out, double n_l_hat,
                            const BootstrapResult& result,
                            const BootstrapConfig& config) {
  out << "N_L_hat = " << format_double(n_l_hat) << '\n';
  out << "se = " << format_double(result.se) << '\n';
  out << "rse_pct = " << format_double(result.rse) << '\n';
  out << "ci_level = " << format_double(config.ci_level) << '\n';
  out << "ci_low = " << format_double(result.ci_low) << '\n';
  out << "ci_high = " << format_double(result.ci_high) << '\n';
  out << "replicates = " << config.replicates << '\n';
  out << "used = " << result.replicate_values.size() << '\n';
  out << "degenerate_count = " << result.degenerate_count << '\n';
}

void write_coverage_csv(std::ostream& out, const Scenario& scenario,
                        const CoverageResult& result) {
  out << "N,p1,p2,m,u,rse_sim,rse_boot,coverage\n";
  out << scenario.N << ',' << format_double(scenario.p1) << ','
      << format_double(scenario.p2) << ',' << format_prob_vector(scenario.m)
      << ',' << format_prob_vector(scenario.u) << ','
      << format_fixed2(result.rse_sim) << ','
      << format_fixed2(result.mean_rse_boot) << ','
      << format_fixed2(result.coverage_pct) << '\n';
}

}  // namespace lfdse
