#include "bottom_up.hpp"

#include "vecsr/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace vecsr::testsupport {
namespace {

std::string term_key(const Term& t) {
    return t.kind == Term::Kind::Object ? render_object(t.obj)
                                        : symbol_name(t.sym);
}

struct PredKey {
    Symbol pred = kNoSymbol;
    bool negated = false;
    bool operator<(const PredKey& o) const {
        return pred != o.pred ? pred < o.pred : negated < o.negated;
    }
};

using Subst = std::map<Symbol, Term>;

Term subst_term(const Term& t, const Subst& s) {
    if (t.kind != Term::Kind::Var)
        return t;
    auto it = s.find(t.sym);
    if (it == s.end())
        throw std::logic_error("oracle: unbound variable " + symbol_name(t.sym));
    return it->second;
}

Literal subst_literal(const Literal& l, const Subst& s) {
    Literal out = l;
    for (Term& t : out.args)
        t = subst_term(t, s);
    return out;
}

void collect_vars(const Literal& l, std::vector<Symbol>& out) {
    for (const Term& t : l.args)
        if (t.kind == Term::Kind::Var &&
            std::find(out.begin(), out.end(), t.sym) == out.end())
            out.push_back(t.sym);
}

// Stratification levels by relaxation; throws if no finite assignment.
std::map<PredKey, int> strata(const Program& p) {
    std::map<PredKey, int> level;
    for (const Rule& r : p.clauses) {
        if (r.is_constraint)
            continue;
        level.try_emplace(PredKey{r.head.predicate, r.head.negated}, 0);
        for (const Literal& l : r.body)
            if (!l.relation && l.predicate != neq_symbol())
                level.try_emplace(PredKey{l.predicate, l.negated}, 0);
    }
    int n = static_cast<int>(level.size());
    for (int round = 0; round < n + 2; ++round) {
        bool changed = false;
        for (const Rule& r : p.clauses) {
            if (r.is_constraint)
                continue;
            int& hl = level[PredKey{r.head.predicate, r.head.negated}];
            for (const Literal& l : r.body) {
                if (l.relation || l.predicate == neq_symbol())
                    continue;
                int bl = level[PredKey{l.predicate, l.negated}];
                int need = l.naf ? bl + 1 : bl;
                if (hl < need) {
                    hl = need;
                    changed = true;
                }
            }
        }
        if (!changed)
            return level;
    }
    // Stratified levels are bounded by the predicate count; still rising
    // after n+2 sweeps means recursion through negation.
    throw std::logic_error("oracle: program is not stratified");
}

bool eval_ground(const std::set<std::string>& model, const StateRecord& s,
                 const Literal& g) {
    if (g.predicate == neq_symbol())
        return !(g.args[0] == g.args[1]);
    bool positive;
    if (g.relation) {
        Tuple t;
        bool objects = true;
        for (const Term& a : g.args) {
            if (a.kind != Term::Kind::Object) {
                objects = false;
                break;
            }
            t.push_back(a.obj);
        }
        positive = objects && s.contains(*g.relation, t);
    } else {
        positive = model.count(atom_key(g.negated, g.predicate, g.args)) > 0;
    }
    return g.naf ? !positive : positive;
}

void enumerate_substs(const std::vector<Symbol>& vars,
                      const std::vector<Term>& universe, std::size_t idx,
                      Subst& current,
                      const std::function<void(const Subst&)>& fn) {
    if (idx == vars.size()) {
        fn(current);
        return;
    }
    for (const Term& c : universe) {
        current[vars[idx]] = c;
        enumerate_substs(vars, universe, idx + 1, current, fn);
    }
    current.erase(vars[idx]);
}

} // namespace

std::string atom_key(bool negated, Symbol pred, const std::vector<Term>& args) {
    std::string key = negated ? "-" : "";
    key += symbol_name(pred);
    for (const Term& t : args)
        key += "/" + term_key(t);
    return key;
}

std::vector<Term> herbrand_universe(const Program& p, const FactBase& f,
                                    const StateRecord& s) {
    std::set<std::string> seen;
    std::vector<Term> out;
    auto add = [&](const Term& t) {
        if (t.kind == Term::Kind::Var || t.kind == Term::Kind::Wildcard)
            return;
        if (seen.insert(term_key(t)).second)
            out.push_back(t);
    };
    for (const Rule& r : p.clauses) {
        for (const Term& t : r.head.args)
            add(t);
        for (const Literal& l : r.body)
            for (const Term& t : l.args)
                add(t);
    }
    for (const StaticFact& fact : f.statics) {
        add(Term::object(fact.subject));
        if (fact.class_arg != kNoSymbol)
            add(Term::symbol(fact.class_arg));
    }
    for (RelationKind k : all_relations())
        for (const Tuple& t : s.list(k))
            for (const ObjectId& o : t)
                add(Term::object(o));
    return out;
}

std::set<std::string> bottom_up_model(const Program& p, const FactBase& f,
                                      const StateRecord& s) {
    std::set<std::string> model;
    for (const StaticFact& fact : f.statics) {
        std::vector<Term> args{Term::object(fact.subject)};
        if (fact.class_arg != kNoSymbol)
            args.push_back(Term::symbol(fact.class_arg));
        model.insert(atom_key(fact.negated, fact.predicate, args));
    }
    std::map<PredKey, int> level = strata(p);
    int max_level = 0;
    for (const auto& [k, v] : level)
        max_level = std::max(max_level, v);
    std::vector<Term> universe = herbrand_universe(p, f, s);
    if (universe.empty())
        universe.push_back(Term::symbol(intern("u0")));

    for (int stratum = 0; stratum <= max_level; ++stratum) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Rule& r : p.clauses) {
                if (r.is_constraint)
                    continue;
                if (level[PredKey{r.head.predicate, r.head.negated}] != stratum)
                    continue;
                std::vector<Symbol> vars;
                collect_vars(r.head, vars);
                for (const Literal& l : r.body)
                    collect_vars(l, vars);
                Subst current;
                enumerate_substs(vars, universe, 0, current, [&](const Subst& sub) {
                    for (const Literal& l : r.body)
                        if (!eval_ground(model, s, subst_literal(l, sub)))
                            return;
                    Literal h = subst_literal(r.head, sub);
                    if (model.insert(atom_key(h.negated, h.predicate, h.args))
                            .second)
                        changed = true;
                });
            }
        }
    }
    return model;
}

bool oracle_entails(const std::set<std::string>& model, const StateRecord& s,
                    const Literal& ground) {
    return eval_ground(model, s, ground);
}

std::set<std::string> oracle_answers(const Program& p, const FactBase& f,
                                     const StateRecord& s,
                                     const std::vector<Literal>& query) {
    std::set<std::string> model = bottom_up_model(p, f, s);
    std::vector<Term> universe = herbrand_universe(p, f, s);
    std::vector<Symbol> vars;
    for (const Literal& l : query)
        collect_vars(l, vars);
    std::set<std::string> answers;
    Subst current;
    enumerate_substs(vars, universe, 0, current, [&](const Subst& sub) {
        for (const Literal& l : query)
            if (!eval_ground(model, s, subst_literal(l, sub)))
                return;
        std::vector<std::pair<std::string, std::string>> parts;
        for (const auto& [v, t] : sub)
            parts.emplace_back(symbol_name(v), term_key(t));
        std::sort(parts.begin(), parts.end());
        std::string line;
        for (const auto& [n, v] : parts)
            line += n + "=" + v + " ";
        answers.insert(line);
    });
    return answers;
}

} // namespace vecsr::testsupport
