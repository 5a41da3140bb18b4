#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "stpm/error.hpp"
#include "stpm/symbols.hpp"

namespace stpm {

// =============================================================================
// Multi-level FeFET and two-FeFET match cell
// =============================================================================

// Programmable threshold states of one MLC FeFET, lowest first.
enum class VthLevel : std::uint8_t { kVth0L, kLvt, kHvt, kVth0H };

// Gate read levels, lowest first. Each sits just above the threshold state of
// the same index.
enum class ReadVoltage : std::uint8_t { kVr0L, kVrL, kVrH, kVr0H };

inline const char* to_string(VthLevel v) noexcept {
  constexpr const char* kNames[] = {"VTH0L", "LVT", "HVT", "VTH0H"};
  return kNames[static_cast<std::size_t>(v)];
}

inline const char* to_string(ReadVoltage r) noexcept {
  constexpr const char* kNames[] = {"VR0L", "VRL", "VRH", "VR0H"};
  return kNames[static_cast<std::size_t>(r)];
}

// Two FeFETs of one match cell. Cell a sits nearer the string input side.
struct CellPair {
  VthLevel a = VthLevel::kVth0L;
  VthLevel b = VthLevel::kVth0L;

  friend constexpr bool operator==(const CellPair&, const CellPair&) = default;
};

// Gate levels applied to (cell a, cell b) for one input symbol.
struct ReadPair {
  ReadVoltage a = ReadVoltage::kVr0L;
  ReadVoltage b = ReadVoltage::kVr0L;

  friend constexpr bool operator==(const ReadPair&, const ReadPair&) = default;
};

struct DeviceParams {
  // Threshold voltage (V), indexed by VthLevel.
  std::array<double, 4> vth = {-1.0, 0.5, 2.0, 3.0};
  // Read voltage (V), indexed by ReadVoltage.
  std::array<double, 4> read = {-0.25, 1.25, 2.5, 3.5};
  double on_current = 1e-6;        // A
  double off_current = 1e-12;      // A
  double sense_threshold = 1e-9;   // A
  double memory_window = 4.0;      // V, upper bound on V(VTH0H) - V(VTH0L)

  double voltage(VthLevel v) const noexcept { return vth[static_cast<std::size_t>(v)]; }
  double voltage(ReadVoltage r) const noexcept { return read[static_cast<std::size_t>(r)]; }

  // Throws ConfigError unless thresholds and read levels interleave as
  // VTH0L < VR0L < LVT < VRL < HVT < VRH < VTH0H < VR0H, the threshold span
  // fits the memory window, and off < sense < on current.
  void validate() const {
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(vth[i] < read[i])) {
        throw ConfigError(std::string("read voltage ") + to_string(static_cast<ReadVoltage>(i)) +
                          " must exceed threshold " + to_string(static_cast<VthLevel>(i)));
      }
      if (i + 1 < 4 && !(read[i] < vth[i + 1])) {
        throw ConfigError(std::string("read voltage ") + to_string(static_cast<ReadVoltage>(i)) +
                          " must be below threshold " + to_string(static_cast<VthLevel>(i + 1)));
      }
    }
    if (vth[3] - vth[0] > memory_window) {
      throw ConfigError("threshold span exceeds the memory window");
    }
    if (!(off_current < sense_threshold && sense_threshold < on_current)) {
      throw ConfigError("currents must satisfy off < sense_threshold < on");
    }
  }
};

// Stored symbol -> programmed (a, b) thresholds.
constexpr CellPair encode_stored(StoredSymbol s) noexcept {
  switch (s) {
    case StoredSymbol::kPlus: return {VthLevel::kHvt, VthLevel::kLvt};
    case StoredSymbol::kMinus: return {VthLevel::kLvt, VthLevel::kHvt};
    case StoredSymbol::kZero: return {VthLevel::kVth0H, VthLevel::kVth0L};
    case StoredSymbol::kDontCare: return {VthLevel::kVth0L, VthLevel::kVth0L};
  }
  return {};
}

// Input symbol -> gate read levels for (a, b).
constexpr ReadPair encode_input(InputSymbol x) noexcept {
  switch (x) {
    case InputSymbol::kPlus: return {ReadVoltage::kVrH, ReadVoltage::kVrL};
    case InputSymbol::kMinus: return {ReadVoltage::kVrL, ReadVoltage::kVrH};
    case InputSymbol::kZero: return {ReadVoltage::kVr0H, ReadVoltage::kVr0L};
  }
  return {};
}

// Two-level switch model: on iff the gate is strictly above the threshold.
inline bool fefet_conducts(VthLevel vth, double gate_v, const DeviceParams& p) noexcept {
  return gate_v > p.voltage(vth);
}

inline double fefet_current(VthLevel vth, double gate_v, const DeviceParams& p) noexcept {
  return fefet_conducts(vth, gate_v, p) ? p.on_current : p.off_current;
}

// Drives both FeFETs of encode_stored(stored) with encode_input(input).
inline bool cell_conducts(StoredSymbol stored, InputSymbol input, const DeviceParams& p) noexcept {
  const CellPair cell = encode_stored(stored);
  const ReadPair gates = encode_input(input);
  return fefet_conducts(cell.a, p.voltage(gates.a), p) &&
         fefet_conducts(cell.b, p.voltage(gates.b), p);
}

inline double cell_current(StoredSymbol stored, InputSymbol input, const DeviceParams& p) noexcept {
  return cell_conducts(stored, input, p) ? p.on_current : p.off_current;
}

}  // namespace stpm
