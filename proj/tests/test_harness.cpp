#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cubeperc/error.hpp"
#include "cubeperc/harness.hpp"
#include "cubeperc/mix.hpp"

using namespace cubeperc;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Errc config_error_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"kind": "Route", "n": [8, 10], "alpha": [0.25], "base_seed": 5,
                                  "seed_count": 3, "pairs": 20, "tolerances": {"mean_queries": 0.5}})");
  CHECK(c.kind == ExperimentKind::Route);
  CHECK(c.n_values == std::vector<int>{8, 10});
  CHECK(c.base_seed == 5);
  CHECK(c.seed_count == 3);
  CHECK(c.pairs == 20);
  CHECK(c.tolerances.at("mean_queries") == 0.5);

  const auto again = parse_config(to_json(c));
  CHECK(again.n_values == c.n_values);
  CHECK(again.alphas == c.alphas);
  CHECK(again.pairs == c.pairs);
  CHECK(again.tolerances == c.tolerances);

  CHECK(config_error_of(R"({"kind": "Route", "bogus": 1})") == Errc::ConfigError);
  CHECK(config_error_of(R"({"kind": "Nope"})") == Errc::ConfigError);
  CHECK(config_error_of(R"({"n": [40]})") == Errc::ConfigError);
  CHECK(config_error_of(R"({"n": [20], "max_n": 16})") == Errc::ConfigError);
  CHECK(config_error_of(R"({"n": "ten"})") == Errc::ConfigError);
  CHECK(config_error_of(R"({"kind": "Moments", "n": [4], "path_depth": 4})") == Errc::ConfigError);
  CHECK(config_error_of("not json") == Errc::ConfigError);
  CHECK(config_error_of("[1, 2]") == Errc::ConfigError);
  CHECK(parse_experiment_kind("CycleCensus") == ExperimentKind::CycleCensus);
}

TEST_CASE("schema and ordering") {
  SweepConfig c;
  c.kind = ExperimentKind::NeighborDist;
  c.n_values = {10, 8};
  c.alphas = {0.75, 0.25};
  c.seed_count = 2;
  c.pairs = 50;
  const auto r = run_sweep(c);
  const auto lines = lines_of(r.csv);
  REQUIRE(lines.size() == 2 + 8);
  CHECK(lines[0] == "# schema=cubeperc.NeighborDist.v1");
  CHECK(lines[1] ==
        "n,alpha,p,seed,median_adj_dist,frac_le_cutoff,overflow_frac,giant_frac,pairs,exhaustive,error");
  CHECK(lines[2].rfind("8,0.25,", 0) == 0);
  CHECK(lines[4].rfind("8,0.75,", 0) == 0);
  CHECK(lines[6].rfind("10,0.25,", 0) == 0);
  CHECK(lines[2].find("," + std::to_string(trial_seed(1, 0)) + ",") != std::string::npos);
  CHECK(lines[3].find("," + std::to_string(trial_seed(1, 1)) + ",") != std::string::npos);
  CHECK(trial_seed(1, 1) == mix64(1, 1));
  CHECK(r.rows == 8);
  CHECK(r.failed_rows == 0);

  SweepConfig empty = c;
  empty.alphas.clear();
  const auto e = run_sweep(empty);
  CHECK(lines_of(e.csv).size() == 2);
  CHECK(e.rows == 0);
}

TEST_CASE("every kind runs and threads do not change the bytes") {
  for (auto kind : {ExperimentKind::NeighborDist, ExperimentKind::Distortion, ExperimentKind::CycleCensus,
                    ExperimentKind::Route, ExperimentKind::Moments}) {
    SweepConfig c;
    c.kind = kind;
    c.n_values = {9};
    c.alphas = {0.3, 0.6};
    c.seed_count = 3;
    c.pairs = 40;
    c.trials = 200;
    c.path_depth = 1;
    c.max_cycle_length = 6;
    c.threads = 1;
    const auto one = run_sweep(c);
    c.threads = 4;
    const auto four = run_sweep(c);
    CHECK(one.csv == four.csv);
    const auto header = lines_of(one.csv)[1];
    std::size_t commas = std::count(header.begin(), header.end(), ',');
    CHECK(commas == experiment_columns(kind).size() + 4);
    for (const auto& line : lines_of(one.csv)) {
      if (line[0] == '#' || line.back() == '"') continue;
      CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) == commas);
    }
    // Distortion at n = 9 cannot place the partition for alpha = 0.3 (m = 0); that is a cell error.
    if (kind != ExperimentKind::Distortion) CHECK(one.failed_rows == 0);
  }
}

TEST_CASE("moments columns") {
  SweepConfig c;
  c.kind = ExperimentKind::Moments;
  c.n_values = {16};
  c.alphas = {0.25};
  c.path_depth = 2;
  c.trials = 500;
  const auto r = run_sweep(c);
  const auto header = lines_of(r.csv)[1];
  for (const char* col : {"analytic_mean", "mc_mean", "mc_trials", "z_score"}) {
    CHECK(header.find(col) != std::string::npos);
  }
  CHECK(r.failed_rows == 0);
}

TEST_CASE("cell errors are recorded and the run continues") {
  SweepConfig c;
  c.kind = ExperimentKind::Distortion;
  c.n_values = {2, 16};
  c.alphas = {0.01};
  const auto r = run_sweep(c);
  CHECK(r.rows == 2);
  CHECK(r.failed_rows == 1);
  const auto lines = lines_of(r.csv);
  CHECK(lines[2].find("DimensionTooSmall") != std::string::npos);
  CHECK(lines[3].back() == ',');
  CHECK(lines[3].find(",1,0,sampled,") != std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.25) == "0.25");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("csv comparison") {
  const std::string a = "# schema=x\nn,mean,error\n1,0.5,\n2,0.25,\"bad, quoted\"\n";
  CHECK(compare_csv("a", a, a, {}).status == GoldenStatus::Pass);
  const std::string close = "# schema=x\nn,mean,error\n1,0.5000001,\n2,0.25,\"bad, quoted\"\n";
  CHECK(compare_csv("a", a, close, {}).status == GoldenStatus::Mismatch);
  CHECK(compare_csv("a", a, close, {{"mean", 1e-3}}).status == GoldenStatus::Pass);
  const std::string far = "# schema=x\nn,mean,error\n1,0.6,\n2,0.25,\"bad, quoted\"\n";
  const auto miss = compare_csv("a", a, far, {{"mean", 1e-3}});
  CHECK(miss.status == GoldenStatus::Mismatch);
  CHECK(miss.detail.find("mean") != std::string::npos);
  const std::string other_n = "# schema=x\nn,mean,error\n3,0.5,\n2,0.25,\"bad, quoted\"\n";
  CHECK(compare_csv("a", a, other_n, {{"mean", 1e-3}}).status == GoldenStatus::Mismatch);
  CHECK(compare_csv("a", a, "# schema=x\nn,mean,error\n", {}).status == GoldenStatus::Mismatch);
}

TEST_CASE("golden verification") {
  const fs::path dir = fs::temp_directory_path() / "cubeperc_golden_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string config = R"({"kind": "CycleCensus", "n": [6], "alpha": [0.2], "seed_count": 2, "max_cycle_length": 6})";
  write_file(dir / "cyc.json", config);
  write_file(dir / "cyc.csv", run_sweep(parse_config(config)).csv);
  CHECK(verify_goldens(dir).passed());

  const std::string perturbed =
      R"({"kind": "CycleCensus", "n": [6], "alpha": [0.2], "seed_count": 2, "max_cycle_length": 6, "base_seed": 2})";
  write_file(dir / "cyc.json", perturbed);
  const auto bad = verify_goldens(dir);
  REQUIRE(bad.checks.size() == 1);
  CHECK(bad.checks[0].status == GoldenStatus::Mismatch);

  write_file(dir / "lonely.json", config);
  const auto missing = verify_goldens(dir);
  REQUIRE(missing.checks.size() == 2);
  CHECK(missing.checks[1].name == "lonely");
  CHECK(missing.checks[1].status == GoldenStatus::MissingGolden);
  fs::remove_all(dir);

  CHECK_THROWS_AS(verify_goldens(dir), Error);
}

TEST_CASE("shipped goldens pass") {
  const auto report = verify_goldens(GOLDEN_DIR);
  CHECK(report.checks.size() >= 5);
  for (const auto& c : report.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.status == GoldenStatus::Pass);
  }
}
