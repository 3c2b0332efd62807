#pragma once

#include "vecsr/scene.hpp"
#include "vecsr/state.hpp"

#include <string>

namespace vecsr {

struct UnknownAgent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lowers a scene graph into the logic fact base: one static atom per node
// datum (type, attributes, category) plus the dynamic StateRecord built from
// state tags and dynamic edges. Deterministic: statics ordered by object
// index then predicate name; state tuples in edge/tag scan order.
FactBase to_facts(const SceneGraph& scene);

// The planner-facing initial state. Validates that the scene names an agent
// and that the agent has a location; throws UnknownAgent otherwise.
StateRecord initial_state(const FactBase& facts, const SceneGraph& scene);

// Dump: static atoms one per line, then one list-form line per non-empty
// dynamic relation, each line "."-terminated.
std::string render_fact_base(const FactBase& facts);

std::string render_state_line(RelationKind k, const std::vector<Tuple>& tuples);

} // namespace vecsr
