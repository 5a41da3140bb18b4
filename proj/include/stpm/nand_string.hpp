#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stpm/device.hpp"
#include "stpm/error.hpp"
#include "stpm/symbols.hpp"

namespace stpm {

// =============================================================================
// NAND string: serial match cells with pulse-width temporal gating
// =============================================================================

// Contents of one string. cells[0] is the time step nearest the source
// (input) side; each cell occupies two word lines, unused word lines are
// always-on pass cells programmed to VTH0L.
struct StringProgram {
  std::vector<CellPair> cells;
  std::size_t pass_cells = 0;

  std::size_t word_lines() const noexcept { return 2 * cells.size() + pass_cells; }
};

// Start and width are in units of the schedule's delta_t.
struct GatePulse {
  std::size_t start = 0;
  std::size_t width = 1;
  ReadPair voltages;

  std::size_t end() const noexcept { return start + width; }
  bool active_at(std::size_t tick) const noexcept { return tick >= start && tick < end(); }
};

struct PulseSchedule {
  std::vector<GatePulse> pulses;  // one per cell, same order as StringProgram::cells
  double delta_t = 1.0;           // s

  std::size_t steps() const noexcept { return pulses.size(); }
};

// Half-open tick interval [begin, end).
struct TickWindow {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TickWindow&, const TickWindow&) = default;
};

struct StringDecision {
  bool conducts = false;
  std::optional<TickWindow> conduction_window;
  double bl_current = 0.0;  // A
};

inline StringProgram program_string(std::span<const StoredSymbol> ref_seq, std::size_t wl_count) {
  if (2 * ref_seq.size() > wl_count) {
    throw CapacityError("wl", std::to_string(ref_seq.size()) + " time steps need " +
                                  std::to_string(2 * ref_seq.size()) + " word lines, string has " +
                                  std::to_string(wl_count));
  }
  StringProgram prog;
  prog.cells.reserve(ref_seq.size());
  for (StoredSymbol s : ref_seq) prog.cells.push_back(encode_stored(s));
  prog.pass_cells = wl_count - 2 * ref_seq.size();
  return prog;
}

// Cell i (1-based) gets a pulse of width (N+1-i) starting at (i-1), so every
// pulse ends at N and the last tick [N-1, N) is the only one where all cells
// are driven at once.
inline PulseSchedule build_pulse_schedule(std::span<const InputSymbol> input_seq, double delta_t) {
  if (input_seq.empty()) throw UsageError("pulse schedule needs at least one input step");
  if (!(delta_t > 0.0)) throw UsageError("delta_t must be positive");
  const std::size_t n = input_seq.size();
  PulseSchedule sched;
  sched.delta_t = delta_t;
  sched.pulses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sched.pulses.push_back(GatePulse{i, n - i, encode_input(input_seq[i])});
  }
  return sched;
}

// Per-tick record written by simulate_string when a trace is requested.
struct StringTraceRow {
  std::size_t tick = 0;
  std::vector<bool> fefet_on;  // 2 per cell (a then b), then pass cells
  double current = 0.0;
};

namespace detail {

inline bool fefet_on_at(VthLevel vth, const GatePulse& pulse, bool use_a, std::size_t tick,
                        const DeviceParams& p) noexcept {
  const double gate = pulse.active_at(tick) ? p.voltage(use_a ? pulse.voltages.a : pulse.voltages.b) : 0.0;
  return fefet_conducts(vth, gate, p);
}

}  // namespace detail

// Discrete-time evaluation over ticks [0, N). Gates sit at 0 V outside their
// pulse; pass cells are held at VR0H throughout. The string conducts iff
// some tick has every FeFET on.
inline StringDecision simulate_string(const StringProgram& prog, const PulseSchedule& sched,
                                      const DeviceParams& p,
                                      std::vector<StringTraceRow>* trace = nullptr) {
  if (sched.pulses.size() != prog.cells.size()) {
    throw DimensionError("schedule has " + std::to_string(sched.pulses.size()) + " pulses, string has " +
                         std::to_string(prog.cells.size()) + " cells");
  }
  const std::size_t n = prog.cells.size();
  const bool pass_on = fefet_conducts(VthLevel::kVth0L, p.voltage(ReadVoltage::kVr0H), p);
  std::size_t horizon = 0;
  for (const GatePulse& g : sched.pulses) horizon = std::max(horizon, g.end());

  StringDecision out;
  for (std::size_t tick = 0; tick < horizon; ++tick) {
    bool all_on = prog.pass_cells == 0 || pass_on;
    if (trace != nullptr) {
      StringTraceRow row;
      row.tick = tick;
      row.fefet_on.reserve(prog.word_lines());
      for (std::size_t i = 0; i < n; ++i) {
        const bool a = detail::fefet_on_at(prog.cells[i].a, sched.pulses[i], true, tick, p);
        const bool b = detail::fefet_on_at(prog.cells[i].b, sched.pulses[i], false, tick, p);
        row.fefet_on.push_back(a);
        row.fefet_on.push_back(b);
        all_on = all_on && a && b;
      }
      row.fefet_on.insert(row.fefet_on.end(), prog.pass_cells, pass_on);
      row.current = all_on ? p.on_current : p.off_current;
      trace->push_back(std::move(row));
    } else {
      for (std::size_t i = 0; i < n && all_on; ++i) {
        all_on = detail::fefet_on_at(prog.cells[i].a, sched.pulses[i], true, tick, p) &&
                 detail::fefet_on_at(prog.cells[i].b, sched.pulses[i], false, tick, p);
      }
    }
    if (all_on) {
      if (!out.conduction_window) {
        out.conduction_window = TickWindow{tick, tick + 1};
      } else if (out.conduction_window->end == tick) {
        out.conduction_window->end = tick + 1;
      }
      out.conducts = true;
    }
  }
  out.bl_current = out.conducts ? p.on_current : p.off_current;
  return out;
}

// Symbolic reference: every position is a don't-care or equals the input.
inline bool string_match_oracle(std::span<const StoredSymbol> ref_seq, std::span<const InputSymbol> input_seq) {
  if (ref_seq.size() != input_seq.size()) {
    throw DimensionError("reference has " + std::to_string(ref_seq.size()) + " steps, input has " +
                         std::to_string(input_seq.size()));
  }
  for (std::size_t i = 0; i < ref_seq.size(); ++i) {
    if (!symbol_matches(ref_seq[i], input_seq[i])) return false;
  }
  return true;
}

// CSV columns: tick, one column per FeFET (c<i>a, c<i>b, pass<k>), current_a.
inline void write_trace_csv(std::ostream& os, const StringProgram& prog,
                            std::span<const StringTraceRow> rows) {
  os << "tick";
  for (std::size_t i = 0; i < prog.cells.size(); ++i) os << ",c" << i + 1 << "a,c" << i + 1 << "b";
  for (std::size_t k = 0; k < prog.pass_cells; ++k) os << ",pass" << k + 1;
  os << ",current_a\n";
  for (const StringTraceRow& r : rows) {
    os << r.tick;
    for (bool on : r.fefet_on) os << ',' << (on ? 1 : 0);
    os << ',' << r.current << '\n';
  }
}

}  // namespace stpm
