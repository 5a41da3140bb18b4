#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpm/array.hpp"
#include "stpm/config.hpp"
#include "stpm/error.hpp"

namespace stpm {

// =============================================================================
// Analytic latency / energy model of one array query
// =============================================================================
//
//   latency = rounds * (wl_sequence_latency + bl_sense_latency)
//   energy  = rounds * active_blocks * (wl * wl_pulse_energy
//                                      + active_bls * bl_sense_energy
//                                      + block_overhead_energy)
//
// Every word line of an active block is pulsed once per round: 2N match
// FeFETs plus (wl - 2N) pass cells. Absolute values depend entirely on
// PerfParams, which must be calibrated by the user.

struct PerfParams {
  double wl_pulse_energy = 0.0;        // J per word-line pulse
  double bl_sense_energy = 0.0;        // J per bit line per round
  double wl_sequence_latency = 0.0;    // s per round (the whole N-step pulse train)
  double bl_sense_latency = 0.0;       // s per round
  double block_overhead_energy = 0.0;  // J per active block per round

  void validate() const {
    if (wl_pulse_energy < 0 || bl_sense_energy < 0 || wl_sequence_latency < 0 || bl_sense_latency < 0 ||
        block_overhead_energy < 0) {
      throw ConfigError("perf parameters must be non-negative");
    }
  }
};

// Keys: perf.wl_pulse_energy, perf.bl_sense_energy, perf.wl_sequence_latency,
// perf.bl_sense_latency, perf.block_overhead_energy.
inline PerfParams perf_params_from(const KeyValueConfig& cfg) {
  PerfParams pp;
  pp.wl_pulse_energy = cfg.get_double("perf.wl_pulse_energy", pp.wl_pulse_energy);
  pp.bl_sense_energy = cfg.get_double("perf.bl_sense_energy", pp.bl_sense_energy);
  pp.wl_sequence_latency = cfg.get_double("perf.wl_sequence_latency", pp.wl_sequence_latency);
  pp.bl_sense_latency = cfg.get_double("perf.bl_sense_latency", pp.bl_sense_latency);
  pp.block_overhead_energy = cfg.get_double("perf.block_overhead_energy", pp.block_overhead_energy);
  pp.validate();
  return pp;
}

inline PerfParams load_perf_params(const std::string& path) { return perf_params_from(KeyValueConfig::load(path)); }

// Placeholder values for desk runs; not calibrated against any device.
inline PerfParams placeholder_perf_params() {
  PerfParams pp;
  pp.wl_pulse_energy = 2.0e-12;
  pp.bl_sense_energy = 5.0e-15;
  pp.wl_sequence_latency = 1.0e-6;
  pp.bl_sense_latency = 2.0e-7;
  pp.block_overhead_energy = 1.0e-12;
  return pp;
}

struct PerfReport {
  double latency_s = 0.0;
  double energy_j = 0.0;
  double wl_energy_j = 0.0;
  double bl_sense_energy_j = 0.0;
  double block_overhead_energy_j = 0.0;
  std::size_t active_blocks = 0;
  std::size_t active_bls = 0;  // per block
  std::size_t rounds = 0;
  std::size_t steps = 0;
  std::size_t wl_pulses = 0;  // per block per round
};

inline PerfReport estimate_query(const ArrayGeometry& g, std::size_t active_blocks, std::size_t active_bls_per_block,
                                 std::size_t rounds, std::size_t steps, const PerfParams& pp) {
  g.validate();
  pp.validate();
  if (active_blocks > g.blocks) {
    throw CapacityError("blocks", std::to_string(active_blocks) + " active blocks exceed " + std::to_string(g.blocks));
  }
  if (active_bls_per_block > g.bl) {
    throw CapacityError("bl", std::to_string(active_bls_per_block) + " active bit lines exceed " + std::to_string(g.bl));
  }
  if (rounds > g.dsl) {
    throw CapacityError("dsl", std::to_string(rounds) + " sense rounds exceed " + std::to_string(g.dsl) + " DSLs");
  }
  if (2 * steps > g.wl) {
    throw CapacityError("wl", std::to_string(steps) + " steps need " + std::to_string(2 * steps) + " word lines");
  }
  PerfReport r;
  r.active_blocks = active_blocks;
  r.active_bls = active_bls_per_block;
  r.rounds = rounds;
  r.steps = steps;
  r.wl_pulses = g.wl;
  const auto per_round_blocks = static_cast<double>(rounds * active_blocks);
  r.wl_energy_j = per_round_blocks * static_cast<double>(g.wl) * pp.wl_pulse_energy;
  r.bl_sense_energy_j = per_round_blocks * static_cast<double>(active_bls_per_block) * pp.bl_sense_energy;
  r.block_overhead_energy_j = per_round_blocks * pp.block_overhead_energy;
  r.energy_j = r.wl_energy_j + r.bl_sense_energy_j + r.block_overhead_energy_j;
  r.latency_s = static_cast<double>(rounds) * (pp.wl_sequence_latency + pp.bl_sense_latency);
  return r;
}

// Report for a query on a programmed array: every used block is active and
// every bit line holding a pattern is sensed in each round.
inline PerfReport estimate_query(const ArrayState& state, std::size_t rounds, const PerfParams& pp) {
  return estimate_query(state.geometry, state.used_blocks(), std::min(state.stored_count, state.geometry.bl), rounds,
                        state.steps, pp);
}

// Fixed part of a sweep: everything except the stored pattern count.
struct SweepWorkload {
  ArrayGeometry geometry;
  std::size_t active_blocks = 64;
  std::size_t steps = 10;
  bool compact = true;
};

// One report per stored-pattern count. Counts are laid out with the
// DSL-major slot rule, so crossing a DSL boundary adds a round.
inline std::vector<PerfReport> sweep_patterns(std::span<const std::size_t> counts, const SweepWorkload& w,
                                              const PerfParams& pp) {
  const ArrayCapacity cap = capacity(w.geometry);
  std::vector<PerfReport> out;
  out.reserve(counts.size());
  for (std::size_t count : counts) {
    if (count == 0 || count > cap.max_patterns) {
      throw CapacityError("slots", "pattern count " + std::to_string(count) + " outside [1, " +
                                       std::to_string(cap.max_patterns) + "]");
    }
    const std::size_t rounds = w.compact ? (count - 1) / w.geometry.bl + 1 : w.geometry.dsl;
    out.push_back(estimate_query(w.geometry, w.active_blocks, std::min(count, w.geometry.bl), rounds, w.steps, pp));
  }
  return out;
}

inline nlohmann::json to_json(const PerfReport& r) {
  return {{"latency_s", r.latency_s},
          {"energy_j", r.energy_j},
          {"breakdown",
           {{"wl_j", r.wl_energy_j}, {"bl_sense_j", r.bl_sense_energy_j}, {"block_overhead_j", r.block_overhead_energy_j}}},
          {"active_blocks", r.active_blocks},
          {"active_bls", r.active_bls},
          {"rounds", r.rounds},
          {"steps", r.steps},
          {"wl_pulses", r.wl_pulses},
          {"model",
           "latency = rounds*(wl_sequence_latency+bl_sense_latency); energy = rounds*active_blocks*"
           "(wl*wl_pulse_energy + active_bls*bl_sense_energy + block_overhead_energy)"}};
}

inline void write_perf_csv_header(std::ostream& os) {
  os << "latency_s,energy_j,wl_j,bl_sense_j,block_overhead_j,active_blocks,active_bls,rounds,steps\n";
}

inline void write_perf_csv_row(std::ostream& os, const PerfReport& r) {
  os << r.latency_s << ',' << r.energy_j << ',' << r.wl_energy_j << ',' << r.bl_sense_energy_j << ','
     << r.block_overhead_energy_j << ',' << r.active_blocks << ',' << r.active_bls << ',' << r.rounds << ','
     << r.steps << '\n';
}

}  // namespace stpm
