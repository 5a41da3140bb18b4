#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "stpm/baselines.hpp"

using namespace stpm;

namespace {

EventSet random_set(std::mt19937_64& rng, std::size_t universe, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint64_t> keys;
  for (std::size_t i = 0; i < universe; ++i) {
    if (u(rng) < density) keys.push_back(pack_event(i / 20, i % 20, static_cast<int>(i % 2) * 2 - 1));
  }
  return make_event_set(std::move(keys));
}

ReferencePattern random_ref(std::mt19937_64& rng, std::size_t id, double dont_care) {
  ReferencePattern r(3, 3, 4, StoredSymbol::kZero, id);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : r.symbols) s = u(rng) < dont_care ? StoredSymbol::kDontCare : kAllStoredSymbols[rng() % 3];
  return r;
}

QueryPattern random_query(std::mt19937_64& rng) {
  QueryPattern q(3, 3, 4, InputSymbol::kZero);
  for (auto& s : q.symbols) s = kAllInputSymbols[rng() % 3];
  return q;
}

}  // namespace

TEST_CASE("brute_force_match semantics") {
  ReferencePattern a(2, 2, 2, StoredSymbol::kPlus, 0);
  ReferencePattern all_x(2, 2, 2, StoredSymbol::kDontCare, 1);
  ReferencePattern b(2, 2, 2, StoredSymbol::kMinus, 2);
  const std::vector<ReferencePattern> refs = {a, all_x, b};
  const QueryPattern q(2, 2, 2, InputSymbol::kPlus);
  CHECK(brute_force_match(q, refs) == std::vector<std::size_t>{0, 1});
  const QueryPattern z(2, 2, 2, InputSymbol::kZero);
  CHECK(brute_force_match(z, refs) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(brute_force_match(QueryPattern(2, 2, 3, InputSymbol::kPlus), refs), DimensionError);
}

TEST_CASE("jaccard") {
  const EventSet x = make_event_set({1, 2, 3});
  const EventSet y = make_event_set({2, 3, 4});
  CHECK(jaccard(x, x) == 1.0);
  CHECK(jaccard(x, make_event_set({7, 8})) == 0.0);
  CHECK(jaccard(x, y) == 0.5);
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard(x, {}) == 0.0);
}

TEST_CASE("event_set keeps only polarised entries") {
  ReferencePattern r(1, 2, 3, StoredSymbol::kZero);
  r.at(0, 1) = StoredSymbol::kPlus;
  r.at(1, 2) = StoredSymbol::kMinus;
  r.at(1, 0) = StoredSymbol::kDontCare;
  CHECK(event_set(r) == EventSet{pack_event(0, 1, 1), pack_event(1, 2, -1)});
}

TEST_CASE("MinHash determinism and order independence") {
  std::vector<std::uint64_t> keys = {11, 5, 99, 42, 7};
  const auto a = minhash_signature(make_event_set(keys), 64, 3);
  std::reverse(keys.begin(), keys.end());
  const auto b = minhash_signature(make_event_set(keys), 64, 3);
  CHECK(a == b);
  CHECK(a.k() == 64);
  CHECK(minhash_signature(make_event_set(keys), 64, 4) != a);
  CHECK_THROWS_AS(minhash_signature({}, 0, 1), UsageError);
}

TEST_CASE("Empty-set signature is a sentinel that only matches itself") {
  const auto empty = minhash_signature({}, 16, 9);
  for (auto v : empty.values) CHECK(v == kEmptySetHash);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    auto s = random_set(rng, 100, 0.05);
    if (s.empty()) continue;
    const auto sig = minhash_signature(s, 16, 9);
    for (auto v : sig.values) CHECK(v != kEmptySetHash);
  }
}

TEST_CASE("MinHash collision rate approximates Jaccard similarity") {
  std::mt19937_64 rng(77);
  SECTION("per-position collision frequency for fixed pairs") {
    for (int pair = 0; pair < 5; ++pair) {
      const EventSet a = random_set(rng, 200, 0.3);
      EventSet b = a;
      // Replace a random share of b to spread the similarities.
      std::vector<std::uint64_t> keys(b.begin(), b.end());
      keys.resize(keys.size() * (5 - pair) / 5);
      for (int i = 0; i < 10 * pair; ++i) keys.push_back(pack_event(1000 + i, 0, 1));
      b = make_event_set(keys);
      const double j = jaccard(a, b);
      std::size_t agree = 0;
      constexpr int kTrials = 10000;
      for (int t = 0; t < kTrials; ++t) {
        const auto sa = minhash_signature(a, 1, 1000 + t);
        const auto sb = minhash_signature(b, 1, 1000 + t);
        agree += sa.values[0] == sb.values[0] ? 1 : 0;
      }
      CHECK(std::abs(static_cast<double>(agree) / kTrials - j) <= 0.02);
    }
  }
  SECTION("mean agreement over random pairs") {
    double sum_agree = 0.0;
    double sum_j = 0.0;
    constexpr int kPairs = 10000;
    for (int t = 0; t < kPairs; ++t) {
      const EventSet a = random_set(rng, 60, 0.4);
      const EventSet b = random_set(rng, 60, 0.4);
      const auto sa = minhash_signature(a, 32, t);
      const auto sb = minhash_signature(b, 32, t);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < 32; ++i) agree += sa.values[i] == sb.values[i] ? 1 : 0;
      sum_agree += static_cast<double>(agree) / 32.0;
      sum_j += jaccard(a, b);
    }
    CHECK(std::abs(sum_agree / kPairs - sum_j / kPairs) <= 0.02);
  }
}

TEST_CASE("LshIndex parameter validation") {
  CHECK_THROWS_AS(LshIndex(LshParams{128, 30, 4, 1}), UsageError);
  CHECK_NOTHROW(LshIndex(LshParams{12, 4, 3, 1}));
}

TEST_CASE("LSH finds an identical pattern and never invents matches") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ReferencePattern> refs;
    for (std::size_t j = 0; j < 20; ++j) refs.push_back(random_ref(rng, j, 0.5));
    LshIndex index(LshParams{16, 8, 2, static_cast<std::uint64_t>(trial)});
    index.build(refs);
    CHECK(index.size() == 20);
    // A fully specified reference seen as a query collides in every band.
    ReferencePattern full = random_ref(rng, 20, 0.0);
    refs.push_back(full);
    index.insert(full);
    QueryPattern exact(3, 3, 4, InputSymbol::kZero);
    for (std::size_t i = 0; i < full.symbols.size(); ++i) exact.symbols[i] = static_cast<InputSymbol>(full.symbols[i]);
    const auto hits = index.query(exact);
    CHECK(std::find(hits.begin(), hits.end(), 20) != hits.end());

    for (int k = 0; k < 5; ++k) {
      const QueryPattern q = random_query(rng);
      const auto lsh = index.query(q);
      const auto truth = brute_force_match(q, refs);
      CHECK(std::includes(truth.begin(), truth.end(), lsh.begin(), lsh.end()));
    }
  }
}

TEST_CASE("LSH signature length mismatch") {
  LshIndex index(LshParams{8, 4, 2, 1});
  CHECK_THROWS_AS(index.candidates(MinHashSignature{1, std::vector<std::uint64_t>(7, 0)}), DimensionError);
}

TEST_CASE("LSH snapshot round trip") {
  std::mt19937_64 rng(12);
  std::vector<ReferencePattern> refs;
  for (std::size_t j = 0; j < 15; ++j) refs.push_back(random_ref(rng, j, 0.3));
  LshIndex index(LshParams{12, 6, 2, 99});
  index.build(refs);
  const auto doc = index.snapshot();
  CHECK(doc["version"] == LshIndex::kSnapshotVersion);
  const LshIndex restored = LshIndex::from_snapshot(nlohmann::json::parse(doc.dump()));
  CHECK(restored.params().k == 12);
  CHECK(restored.params().seed == 99);
  CHECK(restored.signatures() == index.signatures());
  for (int k = 0; k < 50; ++k) {
    const QueryPattern q = random_query(rng);
    CHECK(restored.query(q) == index.query(q));
  }
  auto bad = doc;
  bad["version"] = 2;
  CHECK_THROWS_AS(LshIndex::from_snapshot(bad), UsageError);
}
