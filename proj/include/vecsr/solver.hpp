#pragma once

#include "vecsr/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vecsr {

// Query variable -> ground term (object or symbol constant).
using Binding = std::map<Symbol, Term>;

// Proof tree for one answer. Leaves are facts, state-membership tests,
// naf successes, or built-ins; inner nodes apply program clauses.
struct Derivation {
    enum class Kind : std::uint8_t { Fact, Rule, State, Naf, Builtin };
    Kind kind = Kind::Fact;
    Literal conclusion;        // ground, as proven
    std::size_t clause_index = 0; // for Kind::Rule
    std::vector<Derivation> children;
};

// Indented text rendering, one node per line.
std::string render_derivation(const Derivation& d);

struct Answer {
    Binding binding;
    Derivation derivation;
};

struct SolveOptions {
    int depth_limit = 10000; // rule-application recursion bound
};

struct NonGroundNaf : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DepthExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnstratifiedProgram : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enumerates every answer to the conjunctive query, deterministically:
// program clauses in declaration order first, then static facts in fact-base
// order; dynamic-relation literals test membership in the state record.
// Answers of fully ground subgoals are deduplicated (answer-set reading).
std::vector<Answer> solve(const Program& p, const FactBase& f,
                          const StateRecord& s,
                          const std::vector<Literal>& query,
                          const SolveOptions& opt = {});

// Stops after the first answer.
std::optional<Answer> solve_first(const Program& p, const FactBase& f,
                                  const StateRecord& s,
                                  const std::vector<Literal>& query,
                                  const SolveOptions& opt = {});

bool provable(const Program& p, const FactBase& f, const StateRecord& s,
              const std::vector<Literal>& query, const SolveOptions& opt = {});

struct ConstraintWitness {
    std::size_t clause_index = 0;
    Rule constraint;
    Binding binding;
};

// First integrity constraint whose body is satisfiable in (f, s), with its
// witnessing binding; nullopt when the state is consistent.
std::optional<ConstraintWitness>
violates_constraints(const Program& p, const FactBase& f, const StateRecord& s,
                     const SolveOptions& opt = {});

// Stratification guard: returns a cycle report ("p -> not q -> p") when the
// program recurses through negation, nullopt otherwise. Callers reject such
// programs at load time; solve itself assumes the check already ran.
std::optional<std::string> naf_cycle(const Program& p);

} // namespace vecsr
