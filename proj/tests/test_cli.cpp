#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lfdse/io.hpp"
#include "lfdse/simulate.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* binary_path() {
  const char* bin = std::getenv("LFDSE_BIN");
  REQUIRE_MESSAGE(bin != nullptr,
                  "LFDSE_BIN must point at the CLI binary (set by ctest)");
  return bin;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "lfdse_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CmdResult run_cli(const std::string& args, const std::string& stdin_text = "") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const fs::path in = dir / "stdin.txt";
  std::ofstream(in) << stdin_text;
  const std::string cmd = std::string(binary_path()) + " " + args + " < " +
                          in.string() + " > " + out.string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  return result;
}

// Pattern counts from one seeded draw of a known grid cell, written to a
// file the CLI can ingest.
struct SeededData {
  fs::path counts_path;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
};

SeededData write_seeded_counts() {
  lfdse::PhiloxStream rng(2025, 0, 0);
  const lfdse::CaptureDraw draw = lfdse::generate_capture(1000, 0.7, 0.7, rng);
  const std::vector<double> m{0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
  const std::vector<double> u{0.001, 0.01, 0.05, 0.1, 0.15, 0.2};
  const lfdse::PatternCounts counts =
      lfdse::generate_patterns(draw, m, u, rng);
  SeededData data;
  data.counts_path = scratch_dir() / "counts.txt";
  std::ofstream out(data.counts_path);
  lfdse::write_pattern_counts(out, counts);
  data.n1 = draw.counts.n1p;
  data.n2 = draw.counts.np1;
  return data;
}

}  // namespace

TEST_CASE("cli: simulate runs a config file and writes the CSV") {
  const fs::path dir = scratch_dir();
  const fs::path config = dir / "one.toml";
  {
    std::vector<lfdse::Scenario> list(1);
    list[0].id = 1;
    list[0].N = 150;
    list[0].p1 = 0.7;
    list[0].p2 = 0.7;
    list[0].m = {0.9, 0.9, 0.9};
    list[0].u = {0.05, 0.05, 0.05};
    list[0].reps = 100;
    list[0].seed = 5;
    std::ofstream out(config);
    lfdse::write_scenarios(out, list);
  }
  const fs::path csv = dir / "one.csv";
  const CmdResult r = run_cli("simulate --config " + config.string() +
                              " --threads 2 --out " + csv.string());
  CHECK(r.exit_code == 0);

  std::ifstream in(csv);
  std::string header, row, extra;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  CHECK_FALSE(std::getline(in, extra));
  CHECK(header == std::string(lfdse::kMetricsCsvHeader));
  CHECK(row.rfind("1,150,0.7,0.7,", 0) == 0);
}

TEST_CASE("cli: simulate without a preset or config fails") {
  const CmdResult r = run_cli("simulate");
  CHECK(r.exit_code != 0);
}

TEST_CASE("cli: the paper60 preset emits sixty rows") {
  const fs::path csv = scratch_dir() / "paper60.csv";
  const CmdResult r = run_cli("simulate --preset paper60 --reps 40 --seed 3 "
                              "--threads 2 --out " +
                              csv.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  std::string line;
  int rows = 0;
  REQUIRE(std::getline(in, line));  // header
  int first_id = -1, last_id = -1;
  while (std::getline(in, line)) {
    ++rows;
    const int id = std::stoi(line.substr(0, line.find(',')));
    if (first_id < 0) first_id = id;
    last_id = id;
  }
  CHECK(rows == 60);
  CHECK(first_id == 1);
  CHECK(last_id == 60);
}

TEST_CASE("cli: simulate rejects an unreadable config") {
  const CmdResult r = run_cli("simulate --config /nonexistent/sim.toml");
  CHECK(r.exit_code != 0);
}

TEST_CASE("cli: estimate recovers the population size from seeded counts") {
  const SeededData data = write_seeded_counts();
  const CmdResult r =
      run_cli("estimate " + data.counts_path.string() + " --n1 " +
              std::to_string(data.n1) + " --n2 " + std::to_string(data.n2));
  CHECK(r.exit_code == 0);

  std::istringstream report(r.out);
  const lfdse::LinkageParams params = lfdse::read_params_report(report);
  const double n_l_hat = 1.0 / params.p;
  // table RSE for this cell is 2.80%, so 3 sigma is 84
  CHECK(n_l_hat > 1000.0 - 84.0);
  CHECK(n_l_hat < 1000.0 + 84.0);
  CHECK(r.out.find("N_L_hat = ") != std::string::npos);
  CHECK(r.out.find("n11_hat = ") != std::string::npos);
}

TEST_CASE("cli: estimate enforces the marginal consistency check") {
  const SeededData data = write_seeded_counts();
  const CmdResult r =
      run_cli("estimate " + data.counts_path.string() + " --n1 " +
              std::to_string(data.n1 + 1) + " --n2 " +
              std::to_string(data.n2));
  CHECK(r.exit_code != 0);
}

TEST_CASE("cli: estimate rejects an empty counts file") {
  const fs::path empty = scratch_dir() / "empty.txt";
  std::ofstream(empty) << "# no rows\n";
  const CmdResult r =
      run_cli("estimate " + empty.string() + " --n1 10 --n2 10");
  CHECK(r.exit_code != 0);
}

TEST_CASE("cli: bootstrap is reproducible and validates its config") {
  const SeededData data = write_seeded_counts();
  const std::string base = "bootstrap " + data.counts_path.string() +
                           " --n1 " + std::to_string(data.n1) + " --n2 " +
                           std::to_string(data.n2);

  const CmdResult bad = run_cli(base + " --replicates 1");
  CHECK(bad.exit_code != 0);

  const CmdResult a = run_cli(base + " --replicates 50 --seed 9");
  const CmdResult b = run_cli(base + " --replicates 50 --seed 9");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("rse_pct = ") != std::string::npos);
  CHECK(a.out.find("ci_low = ") != std::string::npos);
}

TEST_CASE("cli: bootstrap spread agrees with the published simulation error") {
  // The (1000, 0.7/0.7) grid cell simulates to a 2.80% relative error;
  // a full bootstrap on one seeded dataset should land nearby.
  const SeededData data = write_seeded_counts();
  const CmdResult r = run_cli("bootstrap " + data.counts_path.string() +
                              " --n1 " + std::to_string(data.n1) + " --n2 " +
                              std::to_string(data.n2) +
                              " --replicates 1000 --seed 11");
  REQUIRE(r.exit_code == 0);
  const auto pos = r.out.find("rse_pct = ");
  REQUIRE(pos != std::string::npos);
  const double rse_boot = std::stod(r.out.substr(pos + 10));
  CHECK(std::abs(rse_boot - 2.80) / 2.80 < 0.15);
}

TEST_CASE("cli: classify reproduces the hand-worked rule") {
  const fs::path params = scratch_dir() / "params.txt";
  std::ofstream(params) << "p_hat = 0.01\n"
                        << "m_1 = 0.9\nm_2 = 0.8\n"
                        << "u_1 = 0.1\nu_2 = 0.2\n";

  const CmdResult r = run_cli(
      "classify " + params.string() + " --mu 0.02 --lambda 0.02",
      "1,1\n1,0\n0,1\n0,0\n");
  CHECK(r.exit_code == 0);

  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line.rfind("1,1,", 0) == 0);
  CHECK(line.find("36") != std::string::npos);
  CHECK(line.find(",link") != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line.find("possible_link") != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line.find("possible_link") != std::string::npos);
  REQUIRE(std::getline(lines, line));
  CHECK(line.rfind("0,0,", 0) == 0);
  CHECK(line.find("non_link") != std::string::npos);
}

TEST_CASE("cli: classify rejects inadmissible error levels") {
  const fs::path params = scratch_dir() / "params2.txt";
  std::ofstream(params) << "p_hat = 0.01\nm_1 = 0.9\nu_1 = 0.1\n";
  const CmdResult r = run_cli(
      "classify " + params.string() + " --mu 0.999 --lambda 0.999", "1\n");
  CHECK(r.exit_code != 0);
}
