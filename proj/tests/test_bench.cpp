#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stpm/bench.hpp"

using namespace stpm;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.dataset.n = 60;
  cfg.dataset.queries = 4;
  cfg.geometry = {64, 3, 32, 13824};
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json without_timing(nlohmann::json j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST_CASE("Benchmark runs all matchers on identical queries") {
  const auto dir = std::filesystem::temp_directory_path() / "stpm_test_bench";
  std::filesystem::remove_all(dir);
  BenchConfig cfg = small_config();
  cfg.output_dir = dir.string();
  const BenchReport r = run_benchmark(cfg);
  REQUIRE(r.runs.size() == 3);
  CHECK(r.nand_agrees_with_brute);
  CHECK(r.nand_perf.has_value());
  for (std::size_t a = 0; a < 3; ++a) CHECK(r.agreement[a][a] == 4);
  const MatcherRun* brute = r.run(Matcher::kBrute);
  const MatcherRun* nand = r.run(Matcher::kNand);
  REQUIRE(brute);
  REQUIRE(nand);
  CHECK(nand->matches == brute->matches);
  CHECK(nand->modeled);
  CHECK_FALSE(brute->modeled);
  REQUIRE(r.lsh_recall.has_value());
  CHECK(*r.lsh_recall <= 1.0);

  const std::string csv = read_file(dir / "bench.csv");
  CHECK(csv.rfind("matcher,query,latency_s,latency_kind,energy_j,match_count,matches\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4);
  const auto summary = read_json_file((dir / "summary.json").string());
  CHECK(summary["nand_agrees_with_brute"] == true);
  CHECK(summary.contains("lsh_recall"));
  CHECK(summary["timing"].contains("brute_over_nand_latency_ratio"));
}

TEST_CASE("Benchmark with brute force only") {
  BenchConfig cfg = small_config();
  cfg.matchers = {Matcher::kBrute};
  const BenchReport r = run_benchmark(cfg);
  CHECK(r.runs.size() == 1);
  CHECK_FALSE(r.nand_perf.has_value());
  CHECK_FALSE(r.lsh_recall.has_value());
  CHECK(r.run(Matcher::kLsh) == nullptr);
}

TEST_CASE("Benchmark summaries are deterministic apart from timing") {
  BenchConfig cfg = small_config();
  const auto a = run_benchmark(cfg).summary;
  const auto b = run_benchmark(cfg).summary;
  CHECK(without_timing(a) == without_timing(b));
}

TEST_CASE("Benchmark config errors") {
  BenchConfig cfg = small_config();
  cfg.geometry = {64, 1, 32, 10};
  CHECK_THROWS_AS(run_benchmark(cfg), CapacityError);
  cfg = small_config();
  cfg.repetitions = 3;
  CHECK_THROWS_AS(run_benchmark(cfg), UsageError);
  cfg = small_config();
  cfg.matchers.clear();
  CHECK_THROWS_AS(run_benchmark(cfg), UsageError);
  CHECK_THROWS_AS(parse_matcher("gpu"), UsageError);
}

TEST_CASE("A disagreeing array is reported as a disagreement error") {
  // A partial block threshold accepts near misses that brute force rejects.
  BenchConfig cfg = small_config();
  cfg.dataset.query_corrupt = 1.0;
  cfg.query_options.block_threshold = 0.5;
  cfg.matchers = {Matcher::kNand};
  CHECK_THROWS_AS(run_benchmark(cfg), DisagreementError);
}

TEST_CASE("Sweep checks") {
  const auto dir = std::filesystem::temp_directory_path() / "stpm_test_sweep";
  std::filesystem::remove_all(dir);
  BenchConfig cfg = small_config();
  cfg.dataset.queries = 10;
  cfg.output_dir = dir.string();
  const std::vector<std::size_t> counts = {20, 40, 80};
  const SweepReport r = run_sweep(cfg, counts);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.checks.latency_constant);
  CHECK(r.checks.single_round_regime);
  CHECK(r.checks.energy_affine);
  CHECK(r.rows[0].nand.latency_s == r.rows[2].nand.latency_s);
  CHECK(r.rows[2].nand.energy_j > r.rows[0].nand.energy_j);
  // The array-derived reports agree with the pure sweep model.
  const SweepWorkload w{cfg.geometry, 64, cfg.dataset.steps, true};
  const auto model = sweep_patterns(counts, w, cfg.perf);
  for (std::size_t i = 0; i < counts.size(); ++i) CHECK(model[i].energy_j == r.rows[i].nand.energy_j);
  CHECK(std::filesystem::exists(dir / "sweep.csv"));
  CHECK(std::filesystem::exists(dir / "sweep.json"));
}

TEST_CASE("evaluate_sweep flags non-affine energy and non-monotone timing") {
  std::vector<SweepRow> rows(3);
  for (std::size_t i = 0; i < 3; ++i) {
    rows[i].count = 10 * (i + 1);
    rows[i].nand.rounds = 1;
    rows[i].nand.latency_s = 1.0;
    rows[i].nand.energy_j = static_cast<double>(rows[i].count);
    rows[i].brute_latency_s = static_cast<double>(i + 1);
  }
  auto ok = evaluate_sweep(rows);
  CHECK(ok.energy_affine);
  CHECK(ok.brute_monotone);
  CHECK(ok.latency_constant);

  rows[1].nand.energy_j = 25.0;
  rows[2].brute_latency_s = 0.5;
  rows[1].nand.latency_s = 2.0;
  auto bad = evaluate_sweep(rows);
  CHECK_FALSE(bad.energy_affine);
  CHECK_FALSE(bad.brute_monotone);
  CHECK_FALSE(bad.latency_constant);
}

TEST_CASE("median_wall_time uses warm-up and repetitions") {
  int calls = 0;
  const double t = median_wall_time([&] { ++calls; }, 1, 5);
  CHECK(calls == 6);
  CHECK(t >= 0.0);
}
