#pragma once

#include "vecsr/state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vecsr {

// Terms carry no function symbols: a term is a variable, an object constant
// ("mug3"), a plain symbol constant ("bed"), or the wildcard "_" allowed only
// in action del patterns.
struct Term {
    enum class Kind : std::uint8_t { Var, Object, Sym, Wildcard } kind = Kind::Sym;
    Symbol sym = kNoSymbol; // variable name or symbol constant
    ObjectId obj;           // for Kind::Object

    static Term var(Symbol name) { return Term{Kind::Var, name, {}}; }
    static Term object(ObjectId id) { return Term{Kind::Object, kNoSymbol, id}; }
    static Term symbol(Symbol s) { return Term{Kind::Sym, s, {}}; }
    static Term wildcard() { return Term{Kind::Wildcard, kNoSymbol, {}}; }

    bool is_ground() const { return kind == Kind::Object || kind == Kind::Sym; }
    bool operator==(const Term&) const = default;
};

std::string render_term(const Term& t);

// A literal: [naf] [-] predicate(args). The builtin X != Y is stored with
// predicate kNeqSymbol. Dynamic-relation literals are normalized: an
// agent-centric relation written with an explicit leading agent argument
// drops it, so close(agent, X) and close(X) are the same literal.
struct Literal {
    bool naf = false;     // negation as failure (outermost)
    bool negated = false; // classical negation -p
    Symbol predicate = kNoSymbol;
    std::vector<Term> args;
    std::optional<RelationKind> relation; // set for dynamic-relation literals

    bool operator==(const Literal&) const = default;
};

Symbol neq_symbol();
std::string render_literal(const Literal& l);

struct Rule {
    Literal head; // ignored when constraint
    std::vector<Literal> body;
    bool is_constraint = false;

    bool operator==(const Rule&) const = default;
};

// A ground or pattern effect over a dynamic relation. Wildcard arguments are
// legal only in del patterns and match any object.
struct Effect {
    RelationKind relation = RelationKind::Close;
    std::vector<Term> args;

    bool operator==(const Effect&) const = default;
};

struct ActionSchema {
    Symbol name = kNoSymbol;
    Symbol tag = kNoSymbol; // plan-text tag, e.g. Walk; defaults from name
    std::vector<Symbol> params;
    std::vector<Literal> pre;
    std::vector<Effect> add;
    std::vector<Effect> del;

    bool operator==(const ActionSchema&) const = default;
};

struct TaskDef {
    Symbol name = kNoSymbol;
    std::vector<Literal> goal;
    Symbol room_hint = kNoSymbol; // room class name, optional

    bool operator==(const TaskDef&) const = default;
};

struct Program {
    std::vector<Rule> clauses; // facts, rules and constraints in decl order
    std::vector<ActionSchema> actions;
    std::vector<TaskDef> tasks;

    const ActionSchema* find_action(Symbol name) const;
    const TaskDef* find_task(Symbol name) const;

    bool operator==(const Program&) const = default;
};

// CamelCase plan-text tag derived from a schema name: put_back -> PutBack.
std::string default_tag(Symbol action_name);

} // namespace vecsr
