#pragma once

#include "vecsr/symbols.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace vecsr {

// A scene object: class name plus the numeric id from the scene document,
// rendered as e.g. "lamp1". The agent is the one distinguished object whose
// class is "agent"; it renders without its index.
struct ObjectId {
    Symbol name = kNoSymbol;
    std::int32_t index = 0;

    bool operator==(const ObjectId&) const = default;
    bool operator!=(const ObjectId&) const = default;
};

bool object_less(const ObjectId& a, const ObjectId& b);

std::string render_object(const ObjectId& id);

// Parses "lamp1" style tokens; "agent" maps to the agent constant.
// Returns nothing for identifiers without a trailing index (class symbols).
std::optional<ObjectId> parse_object(std::string_view token);

Symbol agent_symbol();
bool is_agent(const ObjectId& id);

struct ObjectHash {
    std::size_t operator()(const ObjectId& id) const {
        return std::hash<std::uint64_t>()(
            (static_cast<std::uint64_t>(id.name) << 32) |
            static_cast<std::uint32_t>(id.index));
    }
};

} // namespace vecsr
