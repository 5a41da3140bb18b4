#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stpm/error.hpp"
#include "stpm/pattern.hpp"
#include "stpm/pattern_io.hpp"
#include "stpm/symbols.hpp"

namespace stpm {

// =============================================================================
// Workload generation: LIF spike encoding of flashing '+' / 'x' stimuli
// =============================================================================

struct LifParams {
  double tau_m = 0.005;       // s
  double v_threshold = 0.85;  // V
  double v_rest = 0.0;        // V
  double v_reset = 0.0;       // V
  double dt = 1e-4;           // s

  void validate() const {
    if (!(tau_m > 0.0)) throw UsageError("tau_m must be positive");
    if (!(dt > 0.0)) throw UsageError("dt must be positive");
    if (!(v_threshold > v_rest)) throw UsageError("v_threshold must exceed v_rest");
    if (dt > tau_m / 10.0) throw UsageError("dt must be at most tau_m/10 for forward-Euler accuracy");
  }
};

// Forward-Euler LIF membrane:
//   dv/dt = (v_rest - v + drive) / tau_m
// `drive` is the steady-state depolarisation in volts. Spikes when v reaches
// the threshold, then resets.
struct LifNeuron {
  double v = 0.0;

  explicit LifNeuron(const LifParams& p) : v(p.v_rest) {}

  bool step(double drive, const LifParams& p) noexcept {
    v += p.dt * (p.v_rest - v + drive) / p.tau_m;
    if (v >= p.v_threshold) {
      v = p.v_reset;
      return true;
    }
    return false;
  }
};

enum class Shape { kCross, kPlus };

inline Shape parse_shape(const std::string& s) {
  if (s == "cross" || s == "x") return Shape::kCross;
  if (s == "plus" || s == "+") return Shape::kPlus;
  throw UsageError("unsupported shape '" + s + "' (expected cross or plus)");
}

inline const char* to_string(Shape s) noexcept { return s == Shape::kCross ? "cross" : "plus"; }

// Piecewise-constant drive per pixel, one level per time bin.
struct Stimulus {
  Shape shape = Shape::kCross;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t steps = 0;
  double bin_duration = 0.01;  // s
  std::vector<bool> active;    // per pixel
  std::vector<double> drive;   // [pixel * steps + bin], V

  std::size_t pixels() const noexcept { return height * width; }
  double drive_at(std::size_t pixel, std::size_t bin) const { return drive[pixel * steps + bin]; }
};

// Pixels on the shape. 'cross' is both diagonals; 'plus' is the centre row
// and column, or the two centre rows and columns on an even grid.
inline std::vector<bool> shape_mask(Shape shape, std::size_t side) {
  std::vector<bool> mask(side * side, false);
  const std::size_t lo = (side - 1) / 2;
  const std::size_t hi = side / 2;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const bool on = shape == Shape::kCross ? (r == c || r + c == side - 1)
                                             : (r == lo || r == hi || c == lo || c == hi);
      mask[r * side + c] = on;
    }
  }
  return mask;
}

// Flashing stimulus on a square grid: shape pixels are driven at `amplitude`
// for the first `on_bins` bins of every `period` bins and dark otherwise.
inline Stimulus make_shape_stimulus(Shape shape, std::size_t side, double amplitude, std::size_t steps = 10,
                                    double bin_duration = 0.01, std::size_t on_bins = 2, std::size_t period = 5) {
  if (side == 0) throw UsageError("grid side must be >= 1");
  if (steps == 0) throw UsageError("steps must be >= 1");
  if (period == 0 || on_bins > period) throw UsageError("flash needs 0 < period and on_bins <= period");
  if (!(bin_duration > 0.0)) throw UsageError("bin duration must be positive");
  Stimulus stim;
  stim.shape = shape;
  stim.height = side;
  stim.width = side;
  stim.steps = steps;
  stim.bin_duration = bin_duration;
  stim.active = shape_mask(shape, side);
  stim.drive.assign(side * side * steps, 0.0);
  for (std::size_t px = 0; px < stim.pixels(); ++px) {
    if (!stim.active[px]) continue;
    for (std::size_t b = 0; b < steps; ++b) {
      if (b % period < on_bins) stim.drive[px * steps + b] = amplitude;
    }
  }
  return stim;
}

struct SpikeEvent {
  std::size_t pixel = 0;
  std::size_t step = 0;
  int polarity = 1;

  friend auto operator<=>(const SpikeEvent&, const SpikeEvent&) = default;
};

// Events sorted by (pixel, step); at most one per (pixel, step).
struct SpikeTrain {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t steps = 0;
  std::vector<SpikeEvent> events;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;
};

// Threshold crossings give +1 events; a drop in drive at a bin boundary gives
// a -1 event in that bin. When a bin holds both, the later event wins.
inline SpikeTrain lif_simulate(const Stimulus& stim, const LifParams& p) {
  p.validate();
  const double ratio = stim.bin_duration / p.dt;
  const auto substeps = static_cast<std::size_t>(std::llround(ratio));
  if (substeps == 0 || std::abs(ratio - static_cast<double>(substeps)) > 1e-6 * ratio) {
    throw UsageError("bin duration must be an integer multiple of dt");
  }
  SpikeTrain train;
  train.height = stim.height;
  train.width = stim.width;
  train.steps = stim.steps;
  std::vector<int> bins(stim.steps);
  for (std::size_t px = 0; px < stim.pixels(); ++px) {
    std::fill(bins.begin(), bins.end(), 0);
    LifNeuron neuron(p);
    double prev_drive = 0.0;
    for (std::size_t b = 0; b < stim.steps; ++b) {
      const double drive = stim.drive_at(px, b);
      if (drive < prev_drive) bins[b] = -1;
      prev_drive = drive;
      for (std::size_t k = 0; k < substeps; ++k) {
        if (neuron.step(drive, p)) bins[b] = 1;
      }
    }
    for (std::size_t b = 0; b < stim.steps; ++b) {
      if (bins[b] != 0) train.events.push_back({px, b, bins[b]});
    }
  }
  return train;
}

// Seeded generator with platform-independent derived draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class ShapeMix { kMixed, kCross, kPlus };

inline ShapeMix parse_shape_mix(const std::string& s) {
  if (s == "mixed") return ShapeMix::kMixed;
  if (s == "cross") return ShapeMix::kCross;
  if (s == "plus") return ShapeMix::kPlus;
  throw UsageError("unsupported shape mix '" + s + "' (expected mixed, cross or plus)");
}

struct DatasetConfig {
  std::size_t n = 500;
  ShapeMix shapes = ShapeMix::kMixed;  // mixed alternates cross, plus, cross, ...
  std::uint64_t seed = 42;
  double jitter = 0.1;  // per-event probability of a +-1 step shift
  double flip = 0.02;   // per-event probability of a polarity flip
  std::size_t grid = 8;
  std::size_t steps = 10;
  std::size_t queries = 20;
  double query_corrupt = 0.5;      // probability a query gets one wrong shape symbol
  double query_background = 0.05;  // per-cell event probability on masked pixels
  double amplitude = 1.5;          // V, steady-state drive of lit pixels
  double bin_duration = 0.01;      // s per time step
  std::size_t flash_on = 2;        // lit bins per flash period
  std::size_t flash_period = 5;    // bins
  LifParams lif;

  void validate() const {
    if (n == 0) throw UsageError("dataset needs at least one reference pattern");
    if (grid == 0 || steps == 0) throw UsageError("grid and steps must be >= 1");
    for (double prob : {jitter, flip, query_corrupt, query_background}) {
      if (!(prob >= 0.0 && prob <= 1.0)) throw UsageError("probabilities must lie in [0, 1]");
    }
    lif.validate();
  }
};

struct Dataset {
  ReferenceSet references;
  QuerySet queries;
  std::vector<std::size_t> query_sources;  // reference index each query was derived from
  std::vector<Shape> shapes;               // per reference
};

inline Shape shape_for(ShapeMix mix, std::size_t index) noexcept {
  switch (mix) {
    case ShapeMix::kCross: return Shape::kCross;
    case ShapeMix::kPlus: return Shape::kPlus;
    case ShapeMix::kMixed: break;
  }
  return index % 2 == 0 ? Shape::kCross : Shape::kPlus;
}

// Jitter then polarity flips, applied event by event in (pixel, step) order.
// A shift is dropped if it would leave the window or land on another event.
inline std::vector<SpikeEvent> vary_events(const SpikeTrain& clean, double jitter, double flip, Rng& rng) {
  std::vector<int> grid(clean.height * clean.width * clean.steps, 0);
  for (const SpikeEvent& e : clean.events) grid[e.pixel * clean.steps + e.step] = e.polarity;
  for (const SpikeEvent& e : clean.events) {
    std::size_t step = e.step;
    int pol = grid[e.pixel * clean.steps + step];
    if (rng.chance(jitter)) {
      const bool forward = rng.chance(0.5);
      if (forward ? step + 1 < clean.steps : step > 0) {
        const std::size_t target = forward ? step + 1 : step - 1;
        if (grid[e.pixel * clean.steps + target] == 0) {
          grid[e.pixel * clean.steps + step] = 0;
          step = target;
          grid[e.pixel * clean.steps + step] = pol;
        }
      }
    }
    if (rng.chance(flip)) {
      pol = -pol;
      grid[e.pixel * clean.steps + step] = pol;
    }
  }
  std::vector<SpikeEvent> out;
  for (std::size_t px = 0; px < clean.height * clean.width; ++px) {
    for (std::size_t s = 0; s < clean.steps; ++s) {
      if (const int pol = grid[px * clean.steps + s]; pol != 0) out.push_back({px, s, pol});
    }
  }
  return out;
}

inline ReferencePattern reference_from_events(const std::vector<bool>& active, std::size_t side, std::size_t steps,
                                              const std::vector<SpikeEvent>& events, std::size_t id) {
  ReferencePattern ref(side, side, steps, StoredSymbol::kDontCare, id);
  for (std::size_t px = 0; px < ref.pixels(); ++px) {
    if (!active[px]) continue;
    for (std::size_t s = 0; s < steps; ++s) ref.at(px, s) = StoredSymbol::kZero;
  }
  for (const SpikeEvent& e : events) {
    ref.at(e.pixel, e.step) = e.polarity > 0 ? StoredSymbol::kPlus : StoredSymbol::kMinus;
  }
  return ref;
}

inline Dataset generate_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.references.height = ds.references.width = cfg.grid;
  ds.references.steps = cfg.steps;
  ds.queries.height = ds.queries.width = cfg.grid;
  ds.queries.steps = cfg.steps;

  struct Clean {
    std::vector<bool> active;
    SpikeTrain train;
  };
  std::vector<Clean> clean;
  for (Shape s : {Shape::kCross, Shape::kPlus}) {
    const Stimulus stim = make_shape_stimulus(s, cfg.grid, cfg.amplitude, cfg.steps, cfg.bin_duration,
                                              cfg.flash_on, cfg.flash_period);
    clean.push_back({stim.active, lif_simulate(stim, cfg.lif)});
  }

  ds.references.patterns.reserve(cfg.n);
  for (std::size_t j = 0; j < cfg.n; ++j) {
    const Shape shape = shape_for(cfg.shapes, j);
    const Clean& base = clean[shape == Shape::kCross ? 0 : 1];
    Rng rng(splitmix64(cfg.seed ^ splitmix64(j + 1)));
    const auto events = vary_events(base.train, cfg.jitter, cfg.flip, rng);
    ds.references.patterns.push_back(reference_from_events(base.active, cfg.grid, cfg.steps, events, j));
    ds.shapes.push_back(shape);
  }

  Rng rng(splitmix64(cfg.seed ^ 0x51D3C0DEull));
  for (std::size_t q = 0; q < cfg.queries; ++q) {
    const std::size_t src = rng.below(cfg.n);
    const ReferencePattern& ref = ds.references.patterns[src];
    QueryPattern query(cfg.grid, cfg.grid, cfg.steps, InputSymbol::kZero, q);
    std::vector<std::size_t> shape_cells;
    for (std::size_t px = 0; px < ref.pixels(); ++px) {
      for (std::size_t s = 0; s < cfg.steps; ++s) {
        const StoredSymbol sym = ref.at(px, s);
        if (sym == StoredSymbol::kDontCare) {
          if (rng.chance(cfg.query_background)) {
            query.at(px, s) = rng.chance(0.5) ? InputSymbol::kPlus : InputSymbol::kMinus;
          }
        } else {
          query.at(px, s) = sym == StoredSymbol::kPlus    ? InputSymbol::kPlus
                            : sym == StoredSymbol::kMinus ? InputSymbol::kMinus
                                                          : InputSymbol::kZero;
          shape_cells.push_back(px * cfg.steps + s);
        }
      }
    }
    if (!shape_cells.empty() && rng.chance(cfg.query_corrupt)) {
      const std::size_t cell = shape_cells[rng.below(shape_cells.size())];
      const InputSymbol old = query.symbols[cell];
      const std::size_t shift = 1 + rng.below(2);
      query.symbols[cell] = kAllInputSymbols[(static_cast<std::size_t>(old) + shift) % 3];
    }
    ds.queries.patterns.push_back(std::move(query));
    ds.query_sources.push_back(src);
  }
  return ds;
}

}  // namespace stpm
