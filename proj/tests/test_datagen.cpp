#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "stpm/baselines.hpp"
#include "stpm/datagen.hpp"

using namespace stpm;

namespace {

std::size_t count_active(const Stimulus& s) {
  std::size_t n = 0;
  for (bool a : s.active) n += a ? 1 : 0;
  return n;
}

// Simulated first threshold crossing under constant drive.
double first_spike_time(double drive, const LifParams& p, double t_max) {
  LifNeuron n(p);
  const auto steps = static_cast<std::size_t>(t_max / p.dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (n.step(drive, p)) return static_cast<double>(k) * p.dt;
  }
  return -1.0;
}

}  // namespace

TEST_CASE("Shape stimuli") {
  const Stimulus cross = make_shape_stimulus(Shape::kCross, 8, 1.5);
  CHECK(count_active(cross) == 16);
  for (std::size_t r = 0; r < 8; ++r) {
    CHECK(cross.active[r * 8 + r]);
    CHECK(cross.active[r * 8 + (7 - r)]);
  }

  const Stimulus plus = make_shape_stimulus(Shape::kPlus, 8, 1.5);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const bool expected = r == 3 || r == 4 || c == 3 || c == 4;
      CHECK(plus.active[r * 8 + c] == expected);
    }
  }
  CHECK(count_active(plus) == 28);

  const Stimulus one = make_shape_stimulus(Shape::kCross, 1, 1.0);
  CHECK(count_active(one) == 1);

  CHECK_THROWS_AS(parse_shape("triangle"), UsageError);
  CHECK(count_active(make_shape_stimulus(Shape::kPlus, 5, 1.0)) == 9);
}

TEST_CASE("Masked pixels have zero drive") {
  const Stimulus s = make_shape_stimulus(Shape::kPlus, 8, 2.0);
  for (std::size_t px = 0; px < s.pixels(); ++px) {
    for (std::size_t b = 0; b < s.steps; ++b) {
      if (!s.active[px]) CHECK(s.drive_at(px, b) == 0.0);
    }
  }
}

TEST_CASE("LIF: zero drive never spikes and decays toward rest") {
  LifParams p;
  LifNeuron n(p);
  n.v = 0.5;
  double prev = n.v;
  for (int k = 0; k < 2000; ++k) {
    CHECK_FALSE(n.step(0.0, p));
    CHECK(n.v <= prev);
    CHECK(n.v >= p.v_rest);
    prev = n.v;
  }
}

TEST_CASE("LIF: sub-threshold steady state never spikes") {
  LifParams p;
  CHECK(first_spike_time(0.8, p, 1.0) < 0.0);
}

TEST_CASE("LIF: first spike time matches the closed form within one step") {
  for (double dt : {1e-4, 5e-5, 2.5e-5}) {
    LifParams p;
    p.dt = dt;
    for (double drive : {1.0, 1.5, 3.0}) {
      const double expected = -p.tau_m * std::log(1.0 - p.v_threshold / drive);
      const double got = first_spike_time(drive, p, 0.1);
      CHECK(std::abs(got - expected) <= dt);
    }
  }
}

TEST_CASE("LIF accuracy guard") {
  LifParams p;
  p.dt = p.tau_m / 5.0;
  CHECK_THROWS_AS(lif_simulate(make_shape_stimulus(Shape::kCross, 4, 1.5), p), UsageError);
}

TEST_CASE("lif_simulate output structure") {
  const Stimulus s = make_shape_stimulus(Shape::kCross, 8, 1.5);
  const SpikeTrain t = lif_simulate(s, LifParams{});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : t.events) {
    CHECK(s.active[e.pixel]);
    CHECK(seen.insert({e.pixel, e.step}).second);
  }
  // Lit bins 0,1,5,6 spike; bins 2 and 7 carry the offset event.
  const std::vector<std::pair<std::size_t, int>> expected = {{0, 1}, {1, 1}, {2, -1}, {5, 1}, {6, 1}, {7, -1}};
  std::vector<std::pair<std::size_t, int>> pixel0;
  for (const auto& e : t.events) {
    if (e.pixel == 0) pixel0.push_back({e.step, e.polarity});
  }
  CHECK(pixel0 == expected);
  CHECK(lif_simulate(s, LifParams{}) == t);
}

TEST_CASE("Halving dt moves fewer than 1% of event bins") {
  const Stimulus s = make_shape_stimulus(Shape::kPlus, 8, 1.5);
  LifParams coarse;
  LifParams fine;
  fine.dt = coarse.dt / 2.0;
  const SpikeTrain a = lif_simulate(s, coarse);
  const SpikeTrain b = lif_simulate(s, fine);
  std::vector<int> ga(s.pixels() * s.steps, 0);
  std::vector<int> gb(ga.size(), 0);
  for (const auto& e : a.events) ga[e.pixel * s.steps + e.step] = e.polarity;
  for (const auto& e : b.events) gb[e.pixel * s.steps + e.step] = e.polarity;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < ga.size(); ++i) diff += ga[i] != gb[i] ? 1 : 0;
  CHECK(static_cast<double>(diff) < 0.01 * static_cast<double>(ga.size()));
}

TEST_CASE("Dataset generation is deterministic under the seed") {
  DatasetConfig cfg;
  cfg.n = 120;
  const Dataset a = generate_dataset(cfg);
  const Dataset b = generate_dataset(cfg);
  CHECK(to_json(a.references).dump() == to_json(b.references).dump());
  CHECK(to_json(a.queries).dump() == to_json(b.queries).dump());
  cfg.seed = 43;
  CHECK(to_json(generate_dataset(cfg).references).dump() != to_json(a.references).dump());
}

TEST_CASE("Zero variation reproduces the clean LIF output and respects the mask") {
  DatasetConfig cfg;
  cfg.n = 6;
  cfg.jitter = 0.0;
  cfg.flip = 0.0;
  const Dataset ds = generate_dataset(cfg);
  for (std::size_t j = 0; j < cfg.n; ++j) {
    const Shape shape = ds.shapes[j];
    const Stimulus stim = make_shape_stimulus(shape, cfg.grid, cfg.amplitude, cfg.steps, cfg.bin_duration);
    const SpikeTrain clean = lif_simulate(stim, cfg.lif);
    const ReferencePattern& ref = ds.references.patterns[j];
    CHECK(ref == reference_from_events(stim.active, cfg.grid, cfg.steps, clean.events, j));
    for (std::size_t px = 0; px < ref.pixels(); ++px) {
      for (std::size_t s = 0; s < cfg.steps; ++s) {
        CHECK((ref.at(px, s) == StoredSymbol::kDontCare) == !stim.active[px]);
      }
    }
  }
}

TEST_CASE("Variation keeps events on the shape and one per bin") {
  DatasetConfig cfg;
  cfg.n = 200;
  cfg.jitter = 0.5;
  cfg.flip = 0.2;
  const Dataset ds = generate_dataset(cfg);
  std::set<std::string> distinct;
  for (const auto& ref : ds.references.patterns) {
    distinct.insert(to_json(ReferenceSet{8, 8, 10, {ref}}).dump());
    const auto mask = shape_mask(ds.shapes[ref.id], 8);
    for (std::size_t px = 0; px < 64; ++px) {
      for (std::size_t s = 0; s < 10; ++s) CHECK((ref.at(px, s) == StoredSymbol::kDontCare) == !mask[px]);
    }
  }
  CHECK(distinct.size() > 100);
}

TEST_CASE("A clean query matches its source reference") {
  DatasetConfig cfg;
  cfg.n = 80;
  cfg.queries = 40;
  cfg.query_corrupt = 0.0;
  const Dataset ds = generate_dataset(cfg);
  for (std::size_t q = 0; q < cfg.queries; ++q) {
    const auto hits = brute_force_match(ds.queries.patterns[q], ds.references.patterns);
    CHECK(std::find(hits.begin(), hits.end(), ds.query_sources[q]) != hits.end());
  }
}

TEST_CASE("Dataset config validation") {
  DatasetConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(generate_dataset(cfg), UsageError);
  cfg.n = 1;
  cfg.jitter = 1.5;
  CHECK_THROWS_AS(generate_dataset(cfg), UsageError);
}
