#pragma once

#include "vecsr/ast.hpp"
#include "vecsr/scene.hpp"
#include "vecsr/solver.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vecsr {

enum class OptLevel : std::uint8_t {
    Standard,
    Modular,
    DepGraph,
    PartialGround,
    Full,
};

const char* opt_level_name(OptLevel level);
std::optional<OptLevel> opt_level_from_name(std::string_view name);

// Per-stage record of everything dropped; retained ∪ dropped = original.
struct Provenance {
    struct Item {
        std::string stage; // "modular" | "depgraph" | "ground"
        std::string kind;  // "fact" | "state" | "rule"
        std::string item;  // rendered form
    };
    std::vector<Item> dropped;
};

std::string render_provenance(const Provenance& p);

struct DepNode {
    Symbol pred = kNoSymbol;
    bool negated = false;
    int arity = 0;

    bool operator==(const DepNode&) const = default;
    bool operator<(const DepNode& o) const {
        if (pred != o.pred)
            return pred < o.pred;
        if (negated != o.negated)
            return negated < o.negated;
        return arity < o.arity;
    }
};

struct DepGraph {
    std::vector<DepNode> roots;
    std::set<DepNode> nodes; // reachable from roots, roots included
    std::vector<std::pair<DepNode, DepNode>> edges; // caller -> callee

    bool reachable(const DepNode& n) const { return nodes.count(n) > 0; }
};

struct CompiledKB {
    OptLevel level = OptLevel::Standard;
    Program program;
    FactBase facts; // state pruned alongside the statics
    std::vector<Literal> goal; // task goal, grounding bindings applied
    Binding bindings;          // goal variable -> object constant
    Provenance provenance;
    std::vector<std::string> warnings; // stages downgraded to identity
};

struct NoModuleResolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoCandidate : std::runtime_error {
    Symbol variable;
    NoCandidate(Symbol var, const std::string& msg)
        : std::runtime_error(msg), variable(var) {}
};

// Room-proximity pruning: keeps facts about objects in the task's room plus
// the agent, all room nodes, and door-class connectives; state tuples that
// mention a dropped object are dropped with them.
FactBase modular_prune(const FactBase& f, const SceneGraph& scene,
                       const TaskDef& task, Provenance* prov = nullptr);

// Predicate reachability from the query roots through head -> body edges.
DepGraph build_dependency_graph(const Program& p,
                                const std::vector<Literal>& query);

// Drops clauses whose head is unreachable; constraints and action schemas
// are never dropped.
Program depgraph_prune(const Program& p, const DepGraph& g,
                       Provenance* prov = nullptr);

// Binds each statically-constrained goal variable to its first candidate
// (ascending object index) and keeps only facts about the bound objects,
// goal constants, the agent, rooms, and one dynamic-relation hop around
// them.
CompiledKB partial_ground(const Program& p, const FactBase& f,
                          const TaskDef& task, Provenance* prov = nullptr);

// Applies the stages for the level (full = modular, then depgraph rebuilt
// against the goal plus action preconditions and constraint bodies, then
// partial grounding). A failing stage downgrades to identity with a warning
// so planning can still be attempted.
CompiledKB optimize(const Program& p, const FactBase& f,
                    const SceneGraph& scene, const TaskDef& task,
                    OptLevel level);

} // namespace vecsr
