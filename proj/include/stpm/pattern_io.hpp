#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stpm/error.hpp"
#include "stpm/pattern.hpp"

namespace stpm {

// Pattern document:
//   {"height": H, "width": W, "steps": N,
//    "patterns": [{"id": 0, "symbols": ["+0-X...", ...]}, ...]}
// "symbols" holds one string per pixel (row-major), each N characters long.
// References use the alphabet "+-0X", queries "+-0".
template <typename Symbol>
struct PatternSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t steps = 0;
  std::vector<SpatiotemporalPattern<Symbol>> patterns;

  friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

using ReferenceSet = PatternSet<StoredSymbol>;
using QuerySet = PatternSet<InputSymbol>;

template <typename Symbol>
nlohmann::json to_json(const PatternSet<Symbol>& set) {
  nlohmann::json doc;
  doc["height"] = set.height;
  doc["width"] = set.width;
  doc["steps"] = set.steps;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : set.patterns) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t px = 0; px < p.pixels(); ++px) {
      std::string s;
      s.reserve(p.steps);
      for (Symbol c : p.sequence(px)) s.push_back(to_char(c));
      rows.push_back(std::move(s));
    }
    arr.push_back({{"id", p.id}, {"symbols", std::move(rows)}});
  }
  doc["patterns"] = std::move(arr);
  return doc;
}

template <typename Symbol>
PatternSet<Symbol> pattern_set_from_json(const nlohmann::json& doc) {
  PatternSet<Symbol> set;
  try {
    set.height = doc.at("height").get<std::size_t>();
    set.width = doc.at("width").get<std::size_t>();
    set.steps = doc.at("steps").get<std::size_t>();
    for (const auto& entry : doc.at("patterns")) {
      SpatiotemporalPattern<Symbol> p;
      p.id = entry.at("id").get<std::size_t>();
      p.height = set.height;
      p.width = set.width;
      p.steps = set.steps;
      const auto& rows = entry.at("symbols");
      if (rows.size() != set.height * set.width) {
        throw DimensionError("pattern " + std::to_string(p.id) + " has " + std::to_string(rows.size()) +
                             " pixel rows, expected " + std::to_string(set.height * set.width));
      }
      p.symbols.reserve(set.height * set.width * set.steps);
      for (const auto& row : rows) {
        const std::string s = row.get<std::string>();
        if (s.size() != set.steps) {
          throw DimensionError("pattern " + std::to_string(p.id) + " has a pixel with " +
                               std::to_string(s.size()) + " steps, expected " + std::to_string(set.steps));
        }
        for (char c : s) p.symbols.push_back(parse_symbol<Symbol>(c));
      }
      set.patterns.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed pattern document: ") + e.what());
  }
  return set;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << doc.dump(1) << '\n';
}

template <typename Symbol>
PatternSet<Symbol> load_pattern_set(const std::string& path) {
  return pattern_set_from_json<Symbol>(read_json_file(path));
}

}  // namespace stpm
