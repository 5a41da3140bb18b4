#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "stpm/error.hpp"

namespace stpm {

// Symbol held by a reference pattern at one (pixel, time step).
enum class StoredSymbol : std::uint8_t { kPlus, kMinus, kZero, kDontCare };

// Symbol carried by an incoming event stream at one (pixel, time step).
enum class InputSymbol : std::uint8_t { kPlus, kMinus, kZero };

inline constexpr std::array<StoredSymbol, 4> kAllStoredSymbols = {
    StoredSymbol::kPlus, StoredSymbol::kMinus, StoredSymbol::kZero, StoredSymbol::kDontCare};
inline constexpr std::array<InputSymbol, 3> kAllInputSymbols = {
    InputSymbol::kPlus, InputSymbol::kMinus, InputSymbol::kZero};

// Symbolic match predicate: a don't-care matches anything, otherwise the
// stored value must equal the input value.
constexpr bool symbol_matches(StoredSymbol s, InputSymbol x) noexcept {
  switch (s) {
    case StoredSymbol::kDontCare: return true;
    case StoredSymbol::kPlus: return x == InputSymbol::kPlus;
    case StoredSymbol::kMinus: return x == InputSymbol::kMinus;
    case StoredSymbol::kZero: return x == InputSymbol::kZero;
  }
  return false;
}

constexpr StoredSymbol to_stored(InputSymbol x) noexcept {
  switch (x) {
    case InputSymbol::kPlus: return StoredSymbol::kPlus;
    case InputSymbol::kMinus: return StoredSymbol::kMinus;
    case InputSymbol::kZero: return StoredSymbol::kZero;
  }
  return StoredSymbol::kZero;
}

// Event polarity carried by a symbol: +1, -1, or 0 for no event / masked.
constexpr int polarity(InputSymbol x) noexcept {
  return x == InputSymbol::kPlus ? 1 : x == InputSymbol::kMinus ? -1 : 0;
}
constexpr int polarity(StoredSymbol s) noexcept {
  return s == StoredSymbol::kPlus ? 1 : s == StoredSymbol::kMinus ? -1 : 0;
}

constexpr char to_char(StoredSymbol s) noexcept {
  switch (s) {
    case StoredSymbol::kPlus: return '+';
    case StoredSymbol::kMinus: return '-';
    case StoredSymbol::kZero: return '0';
    case StoredSymbol::kDontCare: return 'X';
  }
  return '?';
}

constexpr char to_char(InputSymbol x) noexcept { return to_char(to_stored(x)); }

inline StoredSymbol parse_stored(char c) {
  switch (c) {
    case '+': return StoredSymbol::kPlus;
    case '-': return StoredSymbol::kMinus;
    case '0': return StoredSymbol::kZero;
    case 'X':
    case 'x': return StoredSymbol::kDontCare;
    default: throw UsageError(std::string("invalid stored symbol '") + c + "' (expected one of +-0X)");
  }
}

inline InputSymbol parse_input(char c) {
  switch (c) {
    case '+': return InputSymbol::kPlus;
    case '-': return InputSymbol::kMinus;
    case '0': return InputSymbol::kZero;
    default: throw UsageError(std::string("invalid input symbol '") + c + "' (expected one of +-0)");
  }
}

// Overload set so templated code can parse either alphabet.
template <typename Symbol>
Symbol parse_symbol(char c);
template <>
inline StoredSymbol parse_symbol<StoredSymbol>(char c) { return parse_stored(c); }
template <>
inline InputSymbol parse_symbol<InputSymbol>(char c) { return parse_input(c); }

}  // namespace stpm
