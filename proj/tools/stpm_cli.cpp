// Command-line front end: dataset generation, array programming, single
// queries, full benchmarks and pattern-count sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stpm/array.hpp"
#include "stpm/bench.hpp"
#include "stpm/config.hpp"
#include "stpm/datagen.hpp"
#include "stpm/perf.hpp"

namespace {

struct DatasetFlags {
  stpm::DatasetConfig cfg;
  std::string shapes = "mixed";

  void add(CLI::App* cmd) {
    cmd->add_option("--n", cfg.n, "Number of reference patterns")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Dataset seed")->capture_default_str();
    cmd->add_option("--grid", cfg.grid, "Square grid side (pixels)")->capture_default_str();
    cmd->add_option("--steps", cfg.steps, "Time steps per pattern")->capture_default_str();
    cmd->add_option("--queries", cfg.queries, "Number of queries")->capture_default_str();
    cmd->add_option("--shapes", shapes, "mixed | cross | plus")->capture_default_str();
    cmd->add_option("--jitter", cfg.jitter, "Per-event +-1 step shift probability")->capture_default_str();
    cmd->add_option("--noise", cfg.flip, "Per-event polarity flip probability")->capture_default_str();
    cmd->add_option("--corrupt", cfg.query_corrupt, "Probability a query gets one wrong symbol")
        ->capture_default_str();
    cmd->add_option("--background", cfg.query_background, "Event probability on masked query pixels")
        ->capture_default_str();
  }

  stpm::DatasetConfig resolve() {
    cfg.shapes = stpm::parse_shape_mix(shapes);
    return cfg;
  }
};

struct GeometryFlags {
  stpm::ArrayGeometry g;

  void add(CLI::App* cmd) {
    cmd->add_option("--blocks", g.blocks, "Blocks")->capture_default_str();
    cmd->add_option("--dsl", g.dsl, "Drain select lines per block")->capture_default_str();
    cmd->add_option("--wl", g.wl, "Word lines per string")->capture_default_str();
    cmd->add_option("--bl", g.bl, "Bit lines per block")->capture_default_str();
  }
};

struct ModelFlags {
  std::string device_path;
  std::string perf_path;

  void add(CLI::App* cmd) {
    cmd->add_option("--device", device_path, "Device parameter file (key=value)")->check(CLI::ExistingFile);
    cmd->add_option("--perf", perf_path, "Perf parameter file (key=value)")->check(CLI::ExistingFile);
  }

  stpm::DeviceParams device() const {
    return device_path.empty() ? stpm::DeviceParams{} : stpm::load_device_params(device_path);
  }
  stpm::PerfParams perf() const {
    return perf_path.empty() ? stpm::placeholder_perf_params() : stpm::load_perf_params(perf_path);
  }
};

std::vector<stpm::Matcher> parse_matchers(const std::vector<std::string>& names) {
  std::vector<stpm::Matcher> out;
  for (const auto& n : names) out.push_back(stpm::parse_matcher(n));
  return out;
}

std::vector<std::string> ids_of(const std::vector<std::size_t>& indices, const std::vector<std::size_t>& ids) {
  std::vector<std::string> out;
  for (std::size_t j : indices) out.push_back(std::to_string(ids[j]));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-memory spatiotemporal pattern matching simulator and benchmark harness"};
  app.require_subcommand(1);

  // gen
  DatasetFlags gen_flags;
  std::string gen_out = ".";
  auto* gen = app.add_subcommand("gen", "Generate reference and query pattern files");
  gen_flags.add(gen);
  gen->add_option("--out", gen_out, "Output directory (refs.json, queries.json)")->capture_default_str();

  // program
  std::string prog_refs;
  std::string prog_out = "array.json";
  GeometryFlags prog_geom;
  auto* program = app.add_subcommand("program", "Program reference patterns into an array and dump it");
  program->add_option("--refs", prog_refs, "Reference pattern file")->required()->check(CLI::ExistingFile);
  program->add_option("--out", prog_out, "Array dump file")->capture_default_str();
  prog_geom.add(program);

  // query
  std::string q_array;
  std::string q_queries;
  std::size_t q_index = 0;
  double q_delta_t = 1e-7;
  double q_threshold = 1.0;
  bool q_full_rounds = false;
  std::string q_trace;
  std::size_t q_trace_block = 0;
  std::size_t q_trace_pattern = 0;
  ModelFlags q_model;
  auto* query_cmd = app.add_subcommand("query", "Run one query against a programmed array");
  query_cmd->add_option("--array", q_array, "Array dump file")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--queries", q_queries, "Query pattern file")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--index", q_index, "Query position in the file")->capture_default_str();
  query_cmd->add_option("--delta-t", q_delta_t, "Unit pulse width (s)")->capture_default_str();
  query_cmd->add_option("--threshold", q_threshold, "Fraction of blocks that must match")->capture_default_str();
  query_cmd->add_flag("--all-dsl", q_full_rounds, "Sense every DSL instead of only occupied ones");
  query_cmd->add_option("--trace", q_trace, "Write a per-tick CSV trace of one string");
  query_cmd->add_option("--trace-block", q_trace_block, "Block of the traced string")->capture_default_str();
  query_cmd->add_option("--trace-pattern", q_trace_pattern, "Pattern (storage index) of the traced string")
      ->capture_default_str();
  q_model.add(query_cmd);

  // bench / sweep share most flags
  DatasetFlags bench_ds;
  GeometryFlags bench_geom;
  ModelFlags bench_model;
  std::vector<std::string> bench_matchers = {"brute", "lsh", "nand"};
  std::string bench_out = "bench_out";
  stpm::BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "Run all matchers on a generated workload");
  bench_ds.add(bench);
  bench_geom.add(bench);
  bench_model.add(bench);
  bench->add_option("--matchers", bench_matchers, "brute, lsh, nand")->delimiter(',')->capture_default_str();
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
  bench->add_option("--reps", bench_cfg.repetitions, "Timed repetitions (>= 5)")->capture_default_str();
  bench->add_option("--lsh-k", bench_cfg.lsh.k, "MinHash signature length")->capture_default_str();
  bench->add_option("--lsh-bands", bench_cfg.lsh.bands, "LSH bands")->capture_default_str();
  bench->add_option("--lsh-rows", bench_cfg.lsh.rows, "LSH rows per band")->capture_default_str();

  DatasetFlags sweep_ds;
  GeometryFlags sweep_geom;
  ModelFlags sweep_model;
  std::vector<std::size_t> sweep_counts = {50, 100, 200, 400};
  std::string sweep_out = "sweep_out";
  stpm::BenchConfig sweep_cfg;
  auto* sweep = app.add_subcommand("sweep", "Sweep the stored pattern count");
  sweep_ds.add(sweep);
  sweep_geom.add(sweep);
  sweep_model.add(sweep);
  sweep->add_option("--counts", sweep_counts, "Stored pattern counts")->delimiter(',')->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_option("--reps", sweep_cfg.repetitions, "Timed repetitions (>= 5)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(stpm::ExitCode::kUsage);
  }

  try {
    if (*gen) {
      const stpm::Dataset ds = stpm::generate_dataset(gen_flags.resolve());
      std::filesystem::create_directories(gen_out);
      const auto dir = std::filesystem::path(gen_out);
      stpm::write_json_file((dir / "refs.json").string(), stpm::to_json(ds.references));
      stpm::write_json_file((dir / "queries.json").string(), stpm::to_json(ds.queries));
      std::cout << "wrote " << ds.references.patterns.size() << " references and " << ds.queries.patterns.size()
                << " queries to " << gen_out << '\n';
    } else if (*program) {
      const auto refs = stpm::load_pattern_set<stpm::StoredSymbol>(prog_refs);
      const stpm::ArrayState state = stpm::program_array(refs.patterns, prog_geom.g);
      stpm::write_json_file(prog_out, stpm::dump_array(state, refs));
      const auto cap = stpm::capacity(prog_geom.g);
      std::cout << "programmed " << state.stored_count << " patterns into " << state.used_blocks() << " blocks ("
                << state.occupied_dsls() << " DSL in use; capacity " << cap.max_steps << " steps, "
                << cap.max_patterns << " patterns per block) -> " << prog_out << '\n';
    } else if (*query_cmd) {
      const auto loaded = stpm::load_array(stpm::read_json_file(q_array));
      const auto queries = stpm::load_pattern_set<stpm::InputSymbol>(q_queries);
      if (q_index >= queries.patterns.size()) throw stpm::UsageError("query index out of range");
      const auto& q = queries.patterns[q_index];
      const stpm::DeviceParams device = q_model.device();
      stpm::QueryOptions opts;
      opts.compact = !q_full_rounds;
      opts.block_threshold = q_threshold;
      const auto result = stpm::query(loaded.state, q, device, q_delta_t, opts);
      const auto perf = stpm::estimate_query(loaded.state, result.sense_rounds, q_model.perf());
      nlohmann::json out;
      out["query_id"] = q.id;
      out["matches"] = ids_of(result.matches, loaded.state.pattern_ids);
      out["sense_rounds"] = result.sense_rounds;
      out["perf"] = stpm::to_json(perf);
      std::cout << out.dump(2) << '\n';
      if (!q_trace.empty()) {
        if (q_trace_block >= loaded.state.used_blocks() || q_trace_pattern >= loaded.state.stored_count) {
          throw stpm::UsageError("trace block or pattern out of range");
        }
        const auto& prog = loaded.state.programs[q_trace_block][q_trace_pattern];
        const auto sched =
            stpm::build_pulse_schedule(q.sequence(loaded.state.pixel_of_block[q_trace_block]), q_delta_t);
        std::vector<stpm::StringTraceRow> rows;
        stpm::simulate_string(prog, sched, device, &rows);
        std::ofstream os(q_trace);
        if (!os) throw stpm::UsageError("cannot write '" + q_trace + "'");
        stpm::write_trace_csv(os, prog, rows);
      }
    } else if (*bench) {
      bench_cfg.dataset = bench_ds.resolve();
      bench_cfg.geometry = bench_geom.g;
      bench_cfg.device = bench_model.device();
      bench_cfg.perf = bench_model.perf();
      bench_cfg.device_config_path = bench_model.device_path;
      bench_cfg.perf_config_path = bench_model.perf_path;
      bench_cfg.matchers = parse_matchers(bench_matchers);
      bench_cfg.output_dir = bench_out;
      const auto report = stpm::run_benchmark(bench_cfg);
      std::cout << report.summary.dump(2) << '\n';
    } else if (*sweep) {
      sweep_cfg.dataset = sweep_ds.resolve();
      sweep_cfg.geometry = sweep_geom.g;
      sweep_cfg.device = sweep_model.device();
      sweep_cfg.perf = sweep_model.perf();
      sweep_cfg.output_dir = sweep_out;
      const auto report = stpm::run_sweep(sweep_cfg, sweep_counts);
      std::cout << report.summary.dump(2) << '\n';
    }
  } catch (const stpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(stpm::exit_code(e));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(stpm::ExitCode::kUsage);
  }
  return 0;
}
