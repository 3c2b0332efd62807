#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vecsr {

// Interned lowercase identifiers (predicate names, class names, tags).
// Symbol 0 is reserved for "the empty symbol".
using Symbol = std::uint32_t;

constexpr Symbol kNoSymbol = 0;

Symbol intern(std::string_view text);
const std::string& symbol_name(Symbol s);
bool symbol_known(std::string_view text);

} // namespace vecsr
