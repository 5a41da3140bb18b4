#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpm/device.hpp"
#include "stpm/error.hpp"
#include "stpm/nand_string.hpp"
#include "stpm/pattern.hpp"
#include "stpm/pattern_io.hpp"

namespace stpm {

// =============================================================================
// Array: blocks x DSL x WL x BL organization and parallel queries
// =============================================================================

struct ArrayGeometry {
  std::size_t blocks = 64;
  std::size_t dsl = 3;
  std::size_t wl = 32;
  std::size_t bl = 13824;

  void validate() const {
    if (blocks == 0 || dsl == 0 || wl == 0 || bl == 0) {
      throw UsageError("array geometry dimensions must all be >= 1");
    }
  }

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

struct ArrayCapacity {
  std::size_t max_steps = 0;
  std::size_t max_patterns = 0;  // per pixel block

  friend bool operator==(const ArrayCapacity&, const ArrayCapacity&) = default;
};

// Two word lines per time step; an odd leftover word line is a pass cell.
inline ArrayCapacity capacity(const ArrayGeometry& g) {
  g.validate();
  return {g.wl / 2, g.dsl * g.bl};
}

// String position inside a block.
struct Slot {
  std::size_t dsl = 0;
  std::size_t bl = 0;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

// Pattern j sits on DSL j / bl, bit line j % bl, in every pixel block.
inline Slot slot_of(std::size_t pattern_index, const ArrayGeometry& g) noexcept {
  return {pattern_index / g.bl, pattern_index % g.bl};
}
inline std::size_t pattern_of(const Slot& s, const ArrayGeometry& g) noexcept { return s.dsl * g.bl + s.bl; }

// Programmed array. Immutable once built by program_array.
struct ArrayState {
  ArrayGeometry geometry;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t steps = 0;
  // Row-major pixel index held by each used block; block b holds pixel b.
  std::vector<std::size_t> pixel_of_block;
  // programs[block][j] is the string for pattern j at slot_of(j).
  std::vector<std::vector<StringProgram>> programs;
  std::size_t stored_count = 0;
  // Pattern ids in storage order, for reporting.
  std::vector<std::size_t> pattern_ids;

  std::size_t used_blocks() const noexcept { return pixel_of_block.size(); }
  // DSLs holding at least one string.
  std::size_t occupied_dsls() const noexcept {
    return stored_count == 0 ? 0 : (stored_count - 1) / geometry.bl + 1;
  }
};

inline ArrayState program_array(std::span<const ReferencePattern> refs, const ArrayGeometry& g) {
  g.validate();
  ArrayState state;
  state.geometry = g;
  if (refs.empty()) return state;

  const ReferencePattern& first = refs.front();
  require_shape(refs, first.height, first.width, first.steps);
  if (first.steps == 0 || first.pixels() == 0) throw UsageError("reference patterns must be non-empty");
  const ArrayCapacity cap = capacity(g);
  if (first.pixels() > g.blocks) {
    throw CapacityError("blocks", std::to_string(first.pixels()) + " pixels need one block each, array has " +
                                      std::to_string(g.blocks));
  }
  if (first.steps > cap.max_steps) {
    throw CapacityError("wl", std::to_string(first.steps) + " time steps exceed the " +
                                  std::to_string(cap.max_steps) + "-step string capacity (" +
                                  std::to_string(g.wl) + " WL)");
  }
  if (refs.size() > cap.max_patterns) {
    throw CapacityError("slots", std::to_string(refs.size()) + " patterns exceed " +
                                     std::to_string(cap.max_patterns) + " slots per block (dsl x bl)");
  }

  state.height = first.height;
  state.width = first.width;
  state.steps = first.steps;
  state.stored_count = refs.size();
  state.pixel_of_block.resize(first.pixels());
  std::iota(state.pixel_of_block.begin(), state.pixel_of_block.end(), std::size_t{0});
  state.programs.resize(first.pixels());
  for (std::size_t block = 0; block < state.programs.size(); ++block) {
    auto& strings = state.programs[block];
    strings.reserve(refs.size());
    const std::size_t pixel = state.pixel_of_block[block];
    for (const ReferencePattern& ref : refs) strings.push_back(program_string(ref.sequence(pixel), g.wl));
  }
  state.pattern_ids.reserve(refs.size());
  for (const ReferencePattern& ref : refs) state.pattern_ids.push_back(ref.id);
  return state;
}

struct QueryOptions {
  // Sense only the DSLs that hold patterns; otherwise every DSL costs a round.
  bool compact = true;
  // Fraction of blocks that must report a slot for it to match. 1 = exact.
  double block_threshold = 1.0;
  // Worker threads used to evaluate blocks. Results do not depend on it.
  std::size_t workers = 1;
};

struct QueryResult {
  std::vector<std::vector<Slot>> per_block_hits;  // sorted slots per block
  std::vector<std::size_t> matches;               // sorted pattern indices
  std::size_t sense_rounds = 0;
};

// Slots reported by enough blocks, translated to pattern indices.
inline std::vector<std::size_t> aggregate(std::span<const std::vector<Slot>> per_block_hits,
                                          std::size_t expected_blocks, const ArrayGeometry& g,
                                          double block_threshold = 1.0) {
  if (per_block_hits.empty() || expected_blocks == 0) {
    throw UsageError("aggregate needs hits from at least one block");
  }
  if (per_block_hits.size() != expected_blocks) {
    throw DimensionError("hits reported for " + std::to_string(per_block_hits.size()) + " of " +
                         std::to_string(expected_blocks) + " blocks");
  }
  if (!(block_threshold > 0.0 && block_threshold <= 1.0)) {
    throw UsageError("block threshold must be in (0, 1]");
  }
  const auto needed = static_cast<std::size_t>(
      std::ceil(block_threshold * static_cast<double>(expected_blocks) - 1e-9));
  std::vector<std::size_t> votes;
  for (const auto& hits : per_block_hits) {
    for (const Slot& s : hits) {
      const std::size_t j = pattern_of(s, g);
      if (j >= votes.size()) votes.resize(j + 1, 0);
      ++votes[j];
    }
  }
  std::vector<std::size_t> matches;
  for (std::size_t j = 0; j < votes.size(); ++j) {
    if (votes[j] >= std::max<std::size_t>(needed, 1)) matches.push_back(j);
  }
  return matches;
}

namespace detail {

inline std::vector<Slot> sense_block(const ArrayState& state, std::size_t block, const QueryPattern& q,
                                     const DeviceParams& p, double delta_t) {
  const PulseSchedule sched = build_pulse_schedule(q.sequence(state.pixel_of_block[block]), delta_t);
  std::vector<Slot> hits;
  const auto& strings = state.programs[block];
  for (std::size_t j = 0; j < strings.size(); ++j) {
    if (simulate_string(strings[j], sched, p).conducts) hits.push_back(slot_of(j, state.geometry));
  }
  return hits;
}

}  // namespace detail

// Broadcasts each pixel's pulse schedule to every string of its block, senses
// bit lines one DSL round at a time and ANDs the hits across blocks.
inline QueryResult query(const ArrayState& state, const QueryPattern& q, const DeviceParams& p, double delta_t,
                         const QueryOptions& opts = {}) {
  q.validate();
  if (!q.same_shape(state.height, state.width, state.steps)) {
    throw DimensionError("query is " + std::to_string(q.height) + "x" + std::to_string(q.width) + "x" +
                         std::to_string(q.steps) + ", array stores " + std::to_string(state.height) + "x" +
                         std::to_string(state.width) + "x" + std::to_string(state.steps));
  }
  if (!(delta_t > 0.0)) throw UsageError("delta_t must be positive");
  QueryResult result;
  result.sense_rounds = opts.compact ? state.occupied_dsls() : state.geometry.dsl;
  const std::size_t blocks = state.used_blocks();
  if (blocks == 0) return result;
  result.per_block_hits.resize(blocks);

  const std::size_t workers = std::clamp<std::size_t>(opts.workers, 1, blocks);
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) result.per_block_hits[b] = detail::sense_block(state, b, q, p, delta_t);
  } else {
    // Each worker owns a strided subset of blocks and writes only its own entries.
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) {
          result.per_block_hits[b] = detail::sense_block(state, b, q, p, delta_t);
        }
      });
    }
  }
  result.matches = aggregate(result.per_block_hits, blocks, state.geometry, opts.block_threshold);
  return result;
}

// Array dump: the reference pattern document plus "geometry".
inline nlohmann::json dump_array(const ArrayState& state, const ReferenceSet& refs) {
  nlohmann::json doc = to_json(refs);
  doc["geometry"] = {{"blocks", state.geometry.blocks},
                     {"dsl", state.geometry.dsl},
                     {"wl", state.geometry.wl},
                     {"bl", state.geometry.bl}};
  return doc;
}

struct LoadedArray {
  ReferenceSet refs;
  ArrayState state;
};

inline LoadedArray load_array(const nlohmann::json& doc) {
  LoadedArray out;
  out.refs = pattern_set_from_json<StoredSymbol>(doc);
  ArrayGeometry g;
  try {
    const auto& gj = doc.at("geometry");
    g.blocks = gj.at("blocks").get<std::size_t>();
    g.dsl = gj.at("dsl").get<std::size_t>();
    g.wl = gj.at("wl").get<std::size_t>();
    g.bl = gj.at("bl").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed array geometry: ") + e.what());
  }
  out.state = program_array(out.refs.patterns, g);
  return out;
}

}  // namespace stpm
