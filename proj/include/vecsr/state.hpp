#pragma once

#include "vecsr/objects.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vecsr {

// The closed set of dynamic relations. Agent-centric relations store only the
// non-agent argument: close(agent, mug1) is kept as the unary tuple [mug1].
enum class RelationKind : std::uint8_t {
    Holds,
    Close,
    On,
    Open,
    OnTopOf,
    Inside,
    Sitting,
    Lying,
    Clean,
    Dirty,
};

constexpr std::size_t kRelationCount = 10;

constexpr std::array<RelationKind, kRelationCount> all_relations() {
    return {RelationKind::Holds,   RelationKind::Close,  RelationKind::On,
            RelationKind::Open,    RelationKind::OnTopOf, RelationKind::Inside,
            RelationKind::Sitting, RelationKind::Lying,  RelationKind::Clean,
            RelationKind::Dirty};
}

const char* relation_name(RelationKind k);
std::optional<RelationKind> relation_from_name(std::string_view name);

// Arity of the stored tuple (after dropping an agent-centric first argument).
int relation_arity(RelationKind k);

// Relations whose subject is implicitly the agent.
bool relation_agent_centric(RelationKind k);

using Tuple = std::vector<ObjectId>; // size 1 or 2

bool tuple_less(const Tuple& a, const Tuple& b);

// Dynamic world state: per-relation tuple lists in insertion order.
// No duplicate tuples; holds carries at most two entries.
struct StateRecord {
    std::array<std::vector<Tuple>, kRelationCount> relations;

    std::vector<Tuple>& list(RelationKind k) {
        return relations[static_cast<std::size_t>(k)];
    }
    const std::vector<Tuple>& list(RelationKind k) const {
        return relations[static_cast<std::size_t>(k)];
    }

    bool contains(RelationKind k, const Tuple& t) const;
    // Inserts unless present; returns true when the record changed.
    bool add(RelationKind k, const Tuple& t);
    // Removes an exact tuple; returns true when the record changed.
    bool remove(RelationKind k, const Tuple& t);

    std::size_t tuple_count() const;

    bool operator==(const StateRecord&) const = default;
};

// Canonical form: every relation list sorted; equal records compare equal
// regardless of insertion order.
StateRecord canonicalize(const StateRecord& s);
std::string state_key(const StateRecord& s);

// One static (immutable) ground atom: type/2, an attribute tag, a category
// tag, or a classically negated attribute such as -movable(tv1).
struct StaticFact {
    Symbol predicate = kNoSymbol;
    bool negated = false;
    ObjectId subject;
    Symbol class_arg = kNoSymbol; // second argument of type/2, else kNoSymbol

    bool operator==(const StaticFact&) const = default;
};

enum class FactClass : std::uint8_t { Type, Attribute, State, Category };

// Everything the solver consults besides the program text: the static facts
// in their canonical dump order plus the dynamic state.
struct FactBase {
    std::vector<StaticFact> statics;
    std::vector<FactClass> classes; // parallel to statics
    StateRecord state;

    bool has_type(const ObjectId& obj, Symbol cls) const;
    bool has_tag(Symbol predicate, const ObjectId& obj) const;
    bool has_negated_tag(Symbol predicate, const ObjectId& obj) const;
};

std::string render_fact(const StaticFact& f);

} // namespace vecsr
