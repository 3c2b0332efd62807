#include "program_gen.hpp"

#include <array>
#include <set>
#include <string>
#include <vector>

namespace vecsr::testsupport {
namespace {

const std::array<const char*, 5> kVars = {"X", "Y", "Z", "W", "V"};
const std::array<const char*, 6> kSyms = {"mug",   "bed",   "sofa",
                                          "table", "knife", "plate"};
const std::array<const char*, 8> kPreds = {"p",        "q",       "r",
                                           "grabbable", "movable", "surface",
                                           "reachable", "tidy"};
const std::array<const char*, 10> kNames = {"pick", "drop", "shove", "wipe",
                                            "nudge", "flip", "stack", "tug",
                                            "spin", "poke"};

int pick(std::mt19937& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

bool chance(std::mt19937& rng, int percent) {
    return pick(rng, 100) < percent;
}

Term random_const(std::mt19937& rng) {
    if (chance(rng, 40)) {
        const char* stem = kSyms[pick(rng, kSyms.size())];
        return Term::object(ObjectId{intern(stem), pick(rng, 9) + 1});
    }
    return Term::symbol(intern(kSyms[pick(rng, kSyms.size())]));
}

Term random_term(std::mt19937& rng, const std::vector<Symbol>& vars) {
    if (!vars.empty() && chance(rng, 60))
        return Term::var(vars[pick(rng, vars.size())]);
    return random_const(rng);
}

// A positive literal, introducing fresh variables from the pool.
Literal positive_literal(std::mt19937& rng, std::vector<Symbol>& bound) {
    Literal l;
    if (chance(rng, 35)) {
        RelationKind k = all_relations()[pick(rng, kRelationCount)];
        l.predicate = intern(relation_name(k));
        l.relation = k;
        for (int i = 0; i < relation_arity(k); ++i) {
            if (chance(rng, 65)) {
                Symbol v = intern(kVars[pick(rng, kVars.size())]);
                l.args.push_back(Term::var(v));
                bound.push_back(v);
            } else {
                l.args.push_back(random_const(rng));
            }
        }
        return l;
    }
    l.predicate = intern(kPreds[pick(rng, kPreds.size())]);
    l.negated = chance(rng, 10);
    int arity = pick(rng, 3); // 0..2
    for (int i = 0; i < arity; ++i) {
        if (chance(rng, 65)) {
            Symbol v = intern(kVars[pick(rng, kVars.size())]);
            l.args.push_back(Term::var(v));
            bound.push_back(v);
        } else {
            l.args.push_back(random_const(rng));
        }
    }
    return l;
}

// A literal restricted to already-bound variables, usable under naf.
Literal bounded_literal(std::mt19937& rng, const std::vector<Symbol>& bound) {
    Literal l;
    if (chance(rng, 35)) {
        RelationKind k = all_relations()[pick(rng, kRelationCount)];
        l.predicate = intern(relation_name(k));
        l.relation = k;
        for (int i = 0; i < relation_arity(k); ++i)
            l.args.push_back(random_term(rng, bound));
        return l;
    }
    l.predicate = intern(kPreds[pick(rng, kPreds.size())]);
    l.negated = chance(rng, 15);
    int arity = pick(rng, 3);
    for (int i = 0; i < arity; ++i)
        l.args.push_back(random_term(rng, bound));
    return l;
}

std::vector<Literal> random_body(std::mt19937& rng, std::vector<Symbol>& bound,
                                 int min_lits) {
    std::vector<Literal> body;
    int positives = min_lits + pick(rng, 3);
    for (int i = 0; i < positives; ++i)
        body.push_back(positive_literal(rng, bound));
    if (!bound.empty() && chance(rng, 40)) {
        Literal l = bounded_literal(rng, bound);
        l.naf = true;
        body.push_back(l);
    }
    if (bound.size() >= 2 && chance(rng, 25)) {
        Literal l;
        l.predicate = neq_symbol();
        l.args.push_back(Term::var(bound[0]));
        l.args.push_back(Term::var(bound[1]));
        body.push_back(l);
    }
    return body;
}

Rule random_rule(std::mt19937& rng) {
    Rule r;
    if (chance(rng, 15)) {
        r.is_constraint = true;
        std::vector<Symbol> bound;
        r.body = random_body(rng, bound, 1);
        return r;
    }
    if (chance(rng, 25)) {
        // Ground fact.
        r.head.predicate = intern(kPreds[pick(rng, kPreds.size())]);
        r.head.negated = chance(rng, 15);
        int arity = pick(rng, 3);
        for (int i = 0; i < arity; ++i)
            r.head.args.push_back(random_const(rng));
        return r;
    }
    std::vector<Symbol> bound;
    r.body = random_body(rng, bound, 1);
    r.head.predicate = intern(kPreds[pick(rng, kPreds.size())]);
    r.head.negated = chance(rng, 10);
    int arity = pick(rng, 3);
    for (int i = 0; i < arity; ++i)
        r.head.args.push_back(random_term(rng, bound));
    return r;
}

Effect random_effect(std::mt19937& rng, const std::vector<Symbol>& params,
                     bool allow_wildcard) {
    Effect e;
    e.relation = all_relations()[pick(rng, kRelationCount)];
    for (int i = 0; i < relation_arity(e.relation); ++i) {
        if (allow_wildcard && chance(rng, 30)) {
            e.args.push_back(Term::wildcard());
        } else if (!params.empty() && chance(rng, 70)) {
            e.args.push_back(Term::var(params[pick(rng, params.size())]));
        } else {
            e.args.push_back(random_const(rng));
        }
    }
    return e;
}

ActionSchema random_action(std::mt19937& rng, Symbol name) {
    ActionSchema a;
    a.name = name;
    a.tag = chance(rng, 50) ? intern(default_tag(name))
                            : intern("Do" + symbol_name(name));
    int nparams = pick(rng, 3); // 0..2
    for (int i = 0; i < nparams; ++i)
        a.params.push_back(intern(std::string(1, static_cast<char>('X' + i))));
    // One positive precondition mentions every parameter.
    if (!a.params.empty()) {
        Literal l;
        l.predicate = intern(kPreds[pick(rng, kPreds.size())]);
        for (Symbol p : a.params)
            l.args.push_back(Term::var(p));
        a.pre.push_back(l);
    }
    std::vector<Symbol> bound = a.params;
    int extra = pick(rng, 3);
    for (int i = 0; i < extra; ++i) {
        Literal l = bounded_literal(rng, bound);
        l.naf = chance(rng, 30);
        if (l.naf)
            l.negated = false;
        a.pre.push_back(l);
    }
    if (a.pre.empty()) {
        Literal l;
        l.predicate = intern("tidy");
        a.pre.push_back(l);
    }
    int nadd = pick(rng, 3);
    for (int i = 0; i < nadd; ++i)
        a.add.push_back(random_effect(rng, a.params, false));
    int ndel = pick(rng, 3);
    for (int i = 0; i < ndel; ++i)
        a.del.push_back(random_effect(rng, a.params, true));
    return a;
}

TaskDef random_task(std::mt19937& rng, Symbol name) {
    TaskDef t;
    t.name = name;
    std::vector<Symbol> bound;
    t.goal = random_body(rng, bound, 1);
    if (chance(rng, 60))
        t.room_hint = intern(kSyms[pick(rng, kSyms.size())]);
    return t;
}

} // namespace

Program random_program(std::mt19937& rng) {
    Program p;
    int nrules = pick(rng, 8);
    for (int i = 0; i < nrules; ++i)
        p.clauses.push_back(random_rule(rng));
    std::set<int> used;
    int nactions = pick(rng, 4);
    for (int i = 0; i < nactions; ++i) {
        int idx = pick(rng, kNames.size());
        if (!used.insert(idx).second)
            continue;
        p.actions.push_back(random_action(rng, intern(kNames[idx])));
    }
    int ntasks = pick(rng, 3);
    std::set<int> used_tasks;
    for (int i = 0; i < ntasks; ++i) {
        int idx = pick(rng, kNames.size());
        if (!used_tasks.insert(idx).second)
            continue;
        p.tasks.push_back(
            random_task(rng, intern(std::string("do_") + kNames[idx])));
    }
    return p;
}

} // namespace vecsr::testsupport
