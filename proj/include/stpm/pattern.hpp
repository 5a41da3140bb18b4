#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stpm/error.hpp"
#include "stpm/symbols.hpp"

namespace stpm {

// Pixels x time-steps grid of symbols. Storage is pixel-major: the time
// sequence of one pixel is contiguous, which is what a NAND string holds.
template <typename Symbol>
struct SpatiotemporalPattern {
  std::size_t id = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t steps = 0;
  std::vector<Symbol> symbols;

  SpatiotemporalPattern() = default;
  SpatiotemporalPattern(std::size_t h, std::size_t w, std::size_t n, Symbol fill, std::size_t pattern_id = 0)
      : id(pattern_id), height(h), width(w), steps(n), symbols(h * w * n, fill) {}

  std::size_t pixels() const noexcept { return height * width; }

  Symbol at(std::size_t pixel, std::size_t step) const { return symbols[pixel * steps + step]; }
  Symbol& at(std::size_t pixel, std::size_t step) { return symbols[pixel * steps + step]; }

  std::span<const Symbol> sequence(std::size_t pixel) const {
    return std::span<const Symbol>(symbols).subspan(pixel * steps, steps);
  }

  bool same_shape(std::size_t h, std::size_t w, std::size_t n) const noexcept {
    return height == h && width == w && steps == n;
  }
  template <typename Other>
  bool same_shape(const SpatiotemporalPattern<Other>& o) const noexcept {
    return same_shape(o.height, o.width, o.steps);
  }

  void validate() const {
    if (symbols.size() != height * width * steps) {
      throw DimensionError("pattern " + std::to_string(id) + " holds " + std::to_string(symbols.size()) +
                           " symbols, expected " + std::to_string(height * width * steps));
    }
  }

  friend bool operator==(const SpatiotemporalPattern&, const SpatiotemporalPattern&) = default;
};

using ReferencePattern = SpatiotemporalPattern<StoredSymbol>;
using QueryPattern = SpatiotemporalPattern<InputSymbol>;

// Throws DimensionError unless every pattern has the given shape.
template <typename Symbol>
void require_shape(std::span<const SpatiotemporalPattern<Symbol>> patterns, std::size_t h, std::size_t w,
                   std::size_t n) {
  for (const auto& p : patterns) {
    p.validate();
    if (!p.same_shape(h, w, n)) {
      throw DimensionError("pattern " + std::to_string(p.id) + " is " + std::to_string(p.height) + "x" +
                           std::to_string(p.width) + "x" + std::to_string(p.steps) + ", expected " +
                           std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(n));
    }
  }
}

}  // namespace stpm
