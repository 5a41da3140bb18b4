#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpm/array.hpp"
#include "stpm/baselines.hpp"
#include "stpm/datagen.hpp"
#include "stpm/device.hpp"
#include "stpm/error.hpp"
#include "stpm/perf.hpp"

namespace stpm {

// =============================================================================
// Benchmark harness
// =============================================================================

enum class Matcher { kBrute, kLsh, kNand };

inline const char* to_string(Matcher m) noexcept {
  switch (m) {
    case Matcher::kBrute: return "brute";
    case Matcher::kLsh: return "lsh";
    case Matcher::kNand: return "nand";
  }
  return "?";
}

inline Matcher parse_matcher(const std::string& s) {
  if (s == "brute") return Matcher::kBrute;
  if (s == "lsh") return Matcher::kLsh;
  if (s == "nand") return Matcher::kNand;
  throw UsageError("unknown matcher '" + s + "' (expected brute, lsh or nand)");
}

struct BenchConfig {
  DatasetConfig dataset;  // dataset.queries is the number of queries run
  ArrayGeometry geometry;
  DeviceParams device;
  PerfParams perf = placeholder_perf_params();
  LshParams lsh;
  QueryOptions query_options;
  std::vector<Matcher> matchers = {Matcher::kBrute, Matcher::kLsh, Matcher::kNand};
  double delta_t = 1e-7;  // s, unit pulse width
  std::size_t warmup = 1;
  std::size_t repetitions = 5;
  std::string output_dir;  // no files written when empty
  // Recorded in the summary only.
  std::string device_config_path;
  std::string perf_config_path;

  void validate() const {
    dataset.validate();
    device.validate();
    perf.validate();
    lsh.validate();
    if (matchers.empty()) throw UsageError("select at least one matcher");
    if (repetitions < 5) throw UsageError("timing needs at least 5 repetitions");
    const ArrayCapacity cap = capacity(geometry);
    if (dataset.n > cap.max_patterns) {
      throw CapacityError("slots", std::to_string(dataset.n) + " patterns exceed array capacity " +
                                       std::to_string(cap.max_patterns));
    }
  }

  bool uses(Matcher m) const { return std::find(matchers.begin(), matchers.end(), m) != matchers.end(); }
};

// Median wall-clock seconds of `fn` over `reps` runs after `warmup` runs.
template <typename Fn>
double median_wall_time(Fn&& fn, std::size_t warmup, std::size_t reps) {
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

struct MatcherRun {
  Matcher matcher = Matcher::kBrute;
  bool modeled = false;              // latency from the perf model rather than a clock
  std::vector<double> latency_s;     // per query
  std::vector<std::vector<std::size_t>> matches;  // per query, storage indices
};

struct BenchReport {
  std::vector<MatcherRun> runs;
  std::optional<PerfReport> nand_perf;
  // agreement[a][b]: number of queries on which runs a and b returned equal sets.
  std::vector<std::vector<std::size_t>> agreement;
  std::size_t queries = 0;
  std::optional<double> lsh_recall;  // sum |lsh| / sum |brute|
  bool nand_agrees_with_brute = true;
  nlohmann::json summary;

  const MatcherRun* run(Matcher m) const {
    for (const auto& r : runs) {
      if (r.matcher == m) return &r;
    }
    return nullptr;
  }
};

inline nlohmann::json environment_metadata() {
  return {{"compiler", __VERSION__},
          {"cplusplus", static_cast<long>(__cplusplus)},
          {"hardware_threads", std::thread::hardware_concurrency()},
          {"clock", "std::chrono::steady_clock"}};
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline std::string join_ids(const std::vector<std::size_t>& ids) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? " " : "") << ids[i];
  return os.str();
}

inline nlohmann::json dataset_json(const DatasetConfig& d) {
  return {{"n", d.n},
          {"seed", d.seed},
          {"grid", d.grid},
          {"steps", d.steps},
          {"queries", d.queries},
          {"jitter", d.jitter},
          {"flip", d.flip},
          {"query_corrupt", d.query_corrupt},
          {"query_background", d.query_background}};
}

inline nlohmann::json geometry_json(const ArrayGeometry& g) {
  return {{"blocks", g.blocks}, {"dsl", g.dsl}, {"wl", g.wl}, {"bl", g.bl}};
}

inline volatile std::size_t g_sink = 0;

}  // namespace detail

// Runs every selected matcher on identical queries. Files (bench.csv,
// summary.json) are written before a NAND/brute-force disagreement is raised.
inline BenchReport run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  const Dataset ds = generate_dataset(cfg.dataset);
  const auto& refs = ds.references.patterns;
  const auto& queries = ds.queries.patterns;

  BenchReport report;
  report.queries = queries.size();

  // Brute force always runs: it is the reference for agreement checks.
  std::vector<std::vector<std::size_t>> truth;
  truth.reserve(queries.size());
  for (const auto& q : queries) truth.push_back(brute_force_match(q, refs));

  for (Matcher m : cfg.matchers) {
    MatcherRun run;
    run.matcher = m;
    switch (m) {
      case Matcher::kBrute: {
        for (std::size_t i = 0; i < queries.size(); ++i) {
          run.latency_s.push_back(median_wall_time(
              [&] { detail::g_sink = brute_force_match(queries[i], refs).size(); }, cfg.warmup, cfg.repetitions));
          run.matches.push_back(truth[i]);
        }
        break;
      }
      case Matcher::kLsh: {
        LshIndex index(cfg.lsh);
        index.build(refs);
        for (const auto& q : queries) {
          run.latency_s.push_back(
              median_wall_time([&] { detail::g_sink = index.query(q).size(); }, cfg.warmup, cfg.repetitions));
          run.matches.push_back(index.query(q));
        }
        break;
      }
      case Matcher::kNand: {
        run.modeled = true;
        const ArrayState state = program_array(refs, cfg.geometry);
        for (const auto& q : queries) {
          const QueryResult r = query(state, q, cfg.device, cfg.delta_t, cfg.query_options);
          const PerfReport perf = estimate_query(state, r.sense_rounds, cfg.perf);
          report.nand_perf = perf;
          run.latency_s.push_back(perf.latency_s);
          run.matches.push_back(r.matches);
        }
        if (queries.empty()) report.nand_perf = estimate_query(state, state.occupied_dsls(), cfg.perf);
        break;
      }
    }
    report.runs.push_back(std::move(run));
  }

  const std::size_t n_runs = report.runs.size();
  report.agreement.assign(n_runs, std::vector<std::size_t>(n_runs, 0));
  for (std::size_t a = 0; a < n_runs; ++a) {
    for (std::size_t b = 0; b < n_runs; ++b) {
      for (std::size_t q = 0; q < queries.size(); ++q) {
        if (report.runs[a].matches[q] == report.runs[b].matches[q]) ++report.agreement[a][b];
      }
    }
  }
  if (const MatcherRun* nand = report.run(Matcher::kNand)) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (nand->matches[q] != truth[q]) report.nand_agrees_with_brute = false;
    }
  }
  if (const MatcherRun* lsh = report.run(Matcher::kLsh)) {
    std::size_t found = 0;
    std::size_t total = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      found += lsh->matches[q].size();
      total += truth[q].size();
    }
    report.lsh_recall = total == 0 ? 1.0 : static_cast<double>(found) / static_cast<double>(total);
  }

  // Summary: deterministic fields at the top level, clock readings under "timing".
  nlohmann::json s;
  s["dataset"] = detail::dataset_json(cfg.dataset);
  s["geometry"] = detail::geometry_json(cfg.geometry);
  s["lsh"] = {{"k", cfg.lsh.k}, {"bands", cfg.lsh.bands}, {"rows", cfg.lsh.rows}, {"seed", cfg.lsh.seed}};
  s["device_config"] = cfg.device_config_path;
  s["perf_config"] = cfg.perf_config_path;
  s["matchers"] = nlohmann::json::array();
  for (const auto& r : report.runs) s["matchers"].push_back(to_string(r.matcher));
  s["agreement"] = report.agreement;
  s["nand_agrees_with_brute"] = report.nand_agrees_with_brute;
  if (report.lsh_recall) s["lsh_recall"] = *report.lsh_recall;
  if (report.nand_perf) {
    s["nand_model"] = to_json(*report.nand_perf);
    s["nand_energy_per_query_j"] = report.nand_perf->energy_j;
    s["nand_energy_total_j"] = report.nand_perf->energy_j * static_cast<double>(queries.size());
  }
  s["baseline_energy"] = "not estimated; compare NAND modeled energy against baseline wall clock only";
  s["environment"] = environment_metadata();
  nlohmann::json timing;
  for (const auto& r : report.runs) {
    double total = 0.0;
    for (double t : r.latency_s) total += t;
    timing[to_string(r.matcher)] = {{"median_per_query_s", detail::median(r.latency_s)},
                                    {"total_s", total},
                                    {"kind", r.modeled ? "modeled" : "measured"}};
  }
  if (const MatcherRun* brute = report.run(Matcher::kBrute); brute && report.nand_perf &&
                                                               report.nand_perf->latency_s > 0.0) {
    timing["brute_over_nand_latency_ratio"] = detail::median(brute->latency_s) / report.nand_perf->latency_s;
  }
  timing["warmup"] = cfg.warmup;
  timing["repetitions"] = cfg.repetitions;
  s["timing"] = std::move(timing);
  report.summary = std::move(s);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream csv(std::filesystem::path(cfg.output_dir) / "bench.csv");
    if (!csv) throw UsageError("cannot write bench.csv in '" + cfg.output_dir + "'");
    csv << std::setprecision(10);
    csv << "matcher,query,latency_s,latency_kind,energy_j,match_count,matches\n";
    for (const auto& r : report.runs) {
      for (std::size_t q = 0; q < queries.size(); ++q) {
        csv << to_string(r.matcher) << ',' << q << ',' << r.latency_s[q] << ','
            << (r.modeled ? "modeled" : "measured") << ',';
        if (r.matcher == Matcher::kNand && report.nand_perf) csv << report.nand_perf->energy_j;
        csv << ',' << r.matches[q].size() << ',' << detail::join_ids(r.matches[q]) << '\n';
      }
    }
    write_json_file((std::filesystem::path(cfg.output_dir) / "summary.json").string(), report.summary);
  }
  if (!report.nand_agrees_with_brute) {
    throw DisagreementError("NAND array matches differ from brute force on at least one query");
  }
  return report;
}

struct SweepRow {
  std::size_t count = 0;
  PerfReport nand;
  double brute_latency_s = 0.0;  // measured, per query
  double lsh_latency_s = 0.0;    // measured, per query
};

struct SweepChecks {
  bool latency_constant = true;     // equal NAND latency within each round regime
  bool single_round_regime = true;  // every count used the same number of rounds
  bool energy_affine = true;        // two-point fit reproduces every point in a regime
  double energy_max_residual_j = 0.0;
  bool brute_monotone = true;       // non-decreasing up to the timer slack
};

struct SweepReport {
  std::vector<SweepRow> rows;
  SweepChecks checks;
  nlohmann::json summary;
};

// Relative slack allowed for a measured brute-force time to dip below the
// previous (smaller) count.
inline constexpr double kTimerSlack = 0.25;

inline SweepChecks evaluate_sweep(std::span<const SweepRow> rows) {
  SweepChecks c;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].nand.rounds != rows.front().nand.rounds) c.single_round_regime = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[j].nand.rounds == rows[i].nand.rounds && rows[j].nand.latency_s != rows[i].nand.latency_s) {
        c.latency_constant = false;
      }
    }
  }
  // Affine check per round regime: fit through the smallest and largest count,
  // then measure every other point of the regime against that line.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].nand.rounds != rows[i].nand.rounds) continue;
      if (!lo || rows[j].count < rows[*lo].count) lo = j;
      if (!hi || rows[j].count > rows[*hi].count) hi = j;
    }
    const SweepRow& a = rows[*lo];
    const SweepRow& b = rows[*hi];
    if (a.count == b.count) continue;
    const double slope = (b.nand.energy_j - a.nand.energy_j) / static_cast<double>(b.count - a.count);
    const double predicted = a.nand.energy_j + slope * (static_cast<double>(rows[i].count) - static_cast<double>(a.count));
    const double residual = std::abs(rows[i].nand.energy_j - predicted);
    c.energy_max_residual_j = std::max(c.energy_max_residual_j, residual);
    const double scale = std::max(std::abs(a.nand.energy_j), std::abs(b.nand.energy_j));
    if (residual > 8.0 * std::numeric_limits<double>::epsilon() * scale) c.energy_affine = false;
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].brute_latency_s < (1.0 - kTimerSlack) * rows[i - 1].brute_latency_s) c.brute_monotone = false;
  }
  if (rows.size() >= 2 && !(rows.back().brute_latency_s > rows.front().brute_latency_s)) c.brute_monotone = false;
  return c;
}

// Stores the first `count` references for each count, checks NAND against
// brute force on every query and records modeled NAND cost alongside the
// measured per-query baseline wall clock (all queries timed as one batch).
inline SweepReport run_sweep(const BenchConfig& cfg, std::span<const std::size_t> counts) {
  if (counts.empty()) throw UsageError("sweep needs at least one pattern count");
  BenchConfig base = cfg;
  base.dataset.n = *std::max_element(counts.begin(), counts.end());
  base.validate();
  for (std::size_t c : counts) {
    if (c == 0) throw CapacityError("slots", "pattern count must be >= 1");
  }
  const Dataset ds = generate_dataset(base.dataset);
  const auto& queries = ds.queries.patterns;
  const double per_query = queries.empty() ? 1.0 : static_cast<double>(queries.size());

  SweepReport report;
  for (std::size_t count : counts) {
    const std::span<const ReferencePattern> refs(ds.references.patterns.data(), count);
    const ArrayState state = program_array(refs, cfg.geometry);
    std::size_t rounds = cfg.query_options.compact ? state.occupied_dsls() : cfg.geometry.dsl;
    for (const auto& q : queries) {
      const QueryResult r = query(state, q, cfg.device, cfg.delta_t, cfg.query_options);
      rounds = r.sense_rounds;
      if (r.matches != brute_force_match(q, refs)) {
        throw DisagreementError("NAND array matches differ from brute force at count " + std::to_string(count));
      }
    }
    SweepRow row;
    row.count = count;
    row.nand = estimate_query(state, rounds, cfg.perf);
    row.brute_latency_s = median_wall_time(
                              [&] {
                                for (const auto& q : queries) detail::g_sink = brute_force_match(q, refs).size();
                              },
                              cfg.warmup, cfg.repetitions) /
                          per_query;
    LshIndex index(cfg.lsh);
    index.build(refs);
    row.lsh_latency_s = median_wall_time(
                            [&] {
                              for (const auto& q : queries) detail::g_sink = index.query(q).size();
                            },
                            cfg.warmup, cfg.repetitions) /
                        per_query;
    report.rows.push_back(row);
  }
  report.checks = evaluate_sweep(report.rows);

  nlohmann::json s;
  s["dataset"] = detail::dataset_json(base.dataset);
  s["geometry"] = detail::geometry_json(cfg.geometry);
  s["counts"] = std::vector<std::size_t>(counts.begin(), counts.end());
  s["checks"] = {{"latency_constant", report.checks.latency_constant},
                 {"single_round_regime", report.checks.single_round_regime},
                 {"energy_affine", report.checks.energy_affine},
                 {"energy_max_residual_j", report.checks.energy_max_residual_j},
                 {"brute_monotone", report.checks.brute_monotone},
                 {"timer_slack", kTimerSlack}};
  s["environment"] = environment_metadata();
  report.summary = std::move(s);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream csv(std::filesystem::path(cfg.output_dir) / "sweep.csv");
    if (!csv) throw UsageError("cannot write sweep.csv in '" + cfg.output_dir + "'");
    csv << std::setprecision(17);
    csv << "count,rounds,nand_latency_s,nand_energy_j,brute_latency_s,lsh_latency_s,brute_over_nand_latency\n";
    for (const auto& r : report.rows) {
      csv << r.count << ',' << r.nand.rounds << ',' << r.nand.latency_s << ',' << r.nand.energy_j << ','
          << r.brute_latency_s << ',' << r.lsh_latency_s << ',';
      if (r.nand.latency_s > 0.0) csv << r.brute_latency_s / r.nand.latency_s;
      csv << '\n';
    }
    write_json_file((std::filesystem::path(cfg.output_dir) / "sweep.json").string(), report.summary);
  }
  return report;
}

}  // namespace stpm
