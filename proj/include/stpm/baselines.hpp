#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpm/datagen.hpp"
#include "stpm/error.hpp"
#include "stpm/pattern.hpp"
#include "stpm/pattern_io.hpp"

namespace stpm {

// =============================================================================
// Software baselines: exhaustive matching and MinHash LSH pre-filtering
// =============================================================================

// Indices j such that every (pixel, step) of refs[j] is a don't-care or
// equals the query symbol.
inline std::vector<std::size_t> brute_force_match(const QueryPattern& q, std::span<const ReferencePattern> refs) {
  q.validate();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < refs.size(); ++j) {
    const ReferencePattern& r = refs[j];
    if (!r.same_shape(q) || r.symbols.size() != q.symbols.size()) {
      throw DimensionError("reference " + std::to_string(r.id) + " and query " + std::to_string(q.id) +
                           " differ in dimensions");
    }
    bool ok = true;
    for (std::size_t i = 0; i < q.symbols.size() && ok; ++i) ok = symbol_matches(r.symbols[i], q.symbols[i]);
    if (ok) out.push_back(j);
  }
  return out;
}

// Sorted, duplicate-free packed (pixel, step, polarity) keys.
using EventSet = std::vector<std::uint64_t>;

constexpr std::uint64_t pack_event(std::size_t pixel, std::size_t step, int polarity) noexcept {
  return (static_cast<std::uint64_t>(pixel) << 33) | (static_cast<std::uint64_t>(step) << 1) |
         (polarity > 0 ? 1u : 0u);
}

template <typename Symbol>
EventSet event_set(const SpatiotemporalPattern<Symbol>& p) {
  EventSet s;
  for (std::size_t px = 0; px < p.pixels(); ++px) {
    for (std::size_t t = 0; t < p.steps; ++t) {
      if (const int pol = polarity(p.at(px, t)); pol != 0) s.push_back(pack_event(px, t, pol));
    }
  }
  return s;  // generated in key order already
}

inline EventSet make_event_set(std::vector<std::uint64_t> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

// |a & b| / |a | b|; two empty sets are identical (1.0).
inline double jaccard(const EventSet& a, const EventSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

struct MinHashSignature {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> values;

  std::size_t k() const noexcept { return values.size(); }
  friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

// Reserved value: only the signature of an empty set contains it.
inline constexpr std::uint64_t kEmptySetHash = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t minhash_function_seed(std::uint64_t seed, std::size_t i) noexcept {
  return splitmix64(seed ^ splitmix64(0xC0FFEEull + i));
}

inline std::uint64_t minhash_hash(std::uint64_t key, std::uint64_t fn_seed) noexcept {
  const std::uint64_t h = splitmix64(key ^ fn_seed);
  return h == kEmptySetHash ? kEmptySetHash - 1 : h;
}

inline MinHashSignature minhash_signature(const EventSet& s, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw UsageError("signature length must be >= 1");
  MinHashSignature sig;
  sig.seed = seed;
  sig.values.assign(k, kEmptySetHash);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t fn = minhash_function_seed(seed, i);
    for (std::uint64_t key : s) sig.values[i] = std::min(sig.values[i], minhash_hash(key, fn));
  }
  return sig;
}

struct LshParams {
  std::size_t k = 128;
  std::size_t bands = 32;
  std::size_t rows = 4;
  std::uint64_t seed = 42;

  void validate() const {
    if (k == 0 || bands == 0 || rows == 0) throw UsageError("LSH k, bands and rows must be >= 1");
    if (bands * rows != k) throw UsageError("LSH requires bands * rows == k");
  }
};

// MinHash banding index with exact verification of every candidate.
class LshIndex {
 public:
  static constexpr int kSnapshotVersion = 1;

  explicit LshIndex(LshParams params = {}) : params_(params), tables_(params.bands) { params_.validate(); }

  const LshParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return patterns_.size(); }
  const std::vector<ReferencePattern>& patterns() const noexcept { return patterns_; }
  const std::vector<MinHashSignature>& signatures() const noexcept { return signatures_; }

  void build(std::span<const ReferencePattern> refs) {
    for (const ReferencePattern& r : refs) insert(r);
  }

  std::size_t insert(const ReferencePattern& ref) {
    return insert(ref, minhash_signature(event_set(ref), params_.k, params_.seed));
  }

  MinHashSignature signature_of(const QueryPattern& q) const {
    return minhash_signature(event_set(q), params_.k, params_.seed);
  }

  // Ids (storage indices) that collide with the signature in at least one band.
  std::vector<std::size_t> candidates(const MinHashSignature& sig) const {
    check_signature(sig);
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < params_.bands; ++b) {
      const auto it = tables_[b].find(band_key(sig, b));
      if (it != tables_[b].end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Verified matches among the candidates for a precomputed signature.
  std::vector<std::size_t> query(const QueryPattern& q, const MinHashSignature& sig) const {
    std::vector<std::size_t> out;
    for (std::size_t j : candidates(sig)) {
      const ReferencePattern& r = patterns_[j];
      if (!r.same_shape(q)) throw DimensionError("query dimensions differ from the indexed patterns");
      bool ok = true;
      for (std::size_t i = 0; i < q.symbols.size() && ok; ++i) ok = symbol_matches(r.symbols[i], q.symbols[i]);
      if (ok) out.push_back(j);
    }
    return out;
  }

  std::vector<std::size_t> query(const QueryPattern& q) const { return query(q, signature_of(q)); }

  // Versioned structured snapshot; band tables are rebuilt on load.
  nlohmann::json snapshot() const {
    nlohmann::json doc;
    doc["format"] = "stpm-lsh-index";
    doc["version"] = kSnapshotVersion;
    doc["k"] = params_.k;
    doc["bands"] = params_.bands;
    doc["rows"] = params_.rows;
    doc["seed"] = params_.seed;
    ReferenceSet set;
    if (!patterns_.empty()) {
      set.height = patterns_.front().height;
      set.width = patterns_.front().width;
      set.steps = patterns_.front().steps;
    }
    set.patterns = patterns_;
    doc["references"] = to_json(set);
    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& s : signatures_) sigs.push_back(s.values);
    doc["signatures"] = std::move(sigs);
    return doc;
  }

  static LshIndex from_snapshot(const nlohmann::json& doc) {
    try {
      if (doc.at("format").get<std::string>() != "stpm-lsh-index") throw UsageError("not an LSH index snapshot");
      if (doc.at("version").get<int>() != kSnapshotVersion) throw UsageError("unsupported LSH snapshot version");
      LshParams p;
      p.k = doc.at("k").get<std::size_t>();
      p.bands = doc.at("bands").get<std::size_t>();
      p.rows = doc.at("rows").get<std::size_t>();
      p.seed = doc.at("seed").get<std::uint64_t>();
      LshIndex index(p);
      const ReferenceSet refs = pattern_set_from_json<StoredSymbol>(doc.at("references"));
      const auto& sigs = doc.at("signatures");
      if (sigs.size() != refs.patterns.size()) throw UsageError("snapshot signature count mismatch");
      for (std::size_t j = 0; j < refs.patterns.size(); ++j) {
        MinHashSignature sig{p.seed, sigs[j].get<std::vector<std::uint64_t>>()};
        index.insert(refs.patterns[j], std::move(sig));
      }
      return index;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("malformed LSH snapshot: ") + e.what());
    }
  }

 private:
  std::size_t insert(const ReferencePattern& ref, MinHashSignature sig) {
    check_signature(sig);
    const std::size_t id = patterns_.size();
    for (std::size_t b = 0; b < params_.bands; ++b) tables_[b][band_key(sig, b)].push_back(id);
    patterns_.push_back(ref);
    signatures_.push_back(std::move(sig));
    return id;
  }

  void check_signature(const MinHashSignature& sig) const {
    if (sig.k() != params_.k) {
      throw DimensionError("signature has " + std::to_string(sig.k()) + " values, index uses k=" +
                           std::to_string(params_.k));
    }
  }

  std::uint64_t band_key(const MinHashSignature& sig, std::size_t band) const noexcept {
    std::uint64_t h = 0x84222325CBF29CE4ull;
    for (std::size_t r = 0; r < params_.rows; ++r) h = splitmix64(h ^ sig.values[band * params_.rows + r]);
    return h;
  }

  LshParams params_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> tables_;
  std::vector<ReferencePattern> patterns_;
  std::vector<MinHashSignature> signatures_;
};

}  // namespace stpm
