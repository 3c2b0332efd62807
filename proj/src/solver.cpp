#include "vecsr/solver.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace vecsr {
namespace {

// Solver-internal term: variables are environment slots, not symbols, so
// renaming a clause apart is just allocating fresh slots.
struct STerm {
    enum class K : std::uint8_t { Var, Obj, Sym } k = K::Sym;
    int var = -1;
    ObjectId obj;
    Symbol sym = kNoSymbol;
};

struct SLit {
    bool naf = false;
    bool negated = false;
    Symbol pred = kNoSymbol;
    std::optional<RelationKind> rel;
    std::vector<STerm> args;
};

class Solver {
public:
    Solver(const Program& p, const FactBase& f, const StateRecord& s,
           const SolveOptions& opt)
        : p_(p), f_(f), s_(s), opt_(opt), type_sym_(intern("type")) {}

    // Sink returns false to stop enumeration.
    using AnswerSink = std::function<bool(const Binding&, Derivation&&)>;

    void run(const std::vector<Literal>& query, const AnswerSink& sink) {
        std::map<Symbol, int> qvars;
        std::vector<SLit> goals;
        goals.reserve(query.size());
        for (const Literal& l : query)
            goals.push_back(convert(l, qvars));
        std::vector<Derivation> derivs;
        solve_seq(goals, 0, 0, derivs, [&]() {
            Binding b;
            for (const auto& [name, slot] : qvars)
                b.emplace(name, to_term(walk(STerm{STerm::K::Var, slot, {}, {}})));
            Derivation root;
            if (derivs.size() == 1) {
                root = derivs[0];
            } else {
                root.kind = Derivation::Kind::Rule;
                root.conclusion = Literal{};
                root.conclusion.predicate = intern("query");
                root.children = derivs;
            }
            return sink(b, std::move(root));
        });
    }

private:
    // ---- environment ----

    int fresh_var() {
        env_.emplace_back();
        return static_cast<int>(env_.size()) - 1;
    }

    STerm walk(STerm t) const {
        while (t.k == STerm::K::Var && env_[t.var].has_value())
            t = *env_[t.var];
        return t;
    }

    void bind(int var, const STerm& value) {
        env_[var] = value;
        trail_.push_back(var);
    }

    std::size_t mark() const { return trail_.size(); }

    void undo(std::size_t m) {
        while (trail_.size() > m) {
            env_[trail_.back()].reset();
            trail_.pop_back();
        }
    }

    bool unify(const STerm& a, const STerm& b) {
        STerm x = walk(a), y = walk(b);
        if (x.k == STerm::K::Var && y.k == STerm::K::Var && x.var == y.var)
            return true;
        if (x.k == STerm::K::Var) {
            bind(x.var, y);
            return true;
        }
        if (y.k == STerm::K::Var) {
            bind(y.var, x);
            return true;
        }
        if (x.k != y.k)
            return false;
        if (x.k == STerm::K::Obj)
            return x.obj == y.obj;
        return x.sym == y.sym;
    }

    SLit convert(const Literal& l, std::map<Symbol, int>& vars) {
        SLit out;
        out.naf = l.naf;
        out.negated = l.negated;
        out.pred = l.predicate;
        out.rel = l.relation;
        out.args.reserve(l.args.size());
        for (const Term& t : l.args) {
            switch (t.kind) {
            case Term::Kind::Var: {
                auto [it, fresh] = vars.try_emplace(t.sym, -1);
                if (fresh)
                    it->second = fresh_var();
                out.args.push_back(STerm{STerm::K::Var, it->second, {}, {}});
                break;
            }
            case Term::Kind::Object:
                out.args.push_back(STerm{STerm::K::Obj, -1, t.obj, {}});
                break;
            case Term::Kind::Sym:
                out.args.push_back(STerm{STerm::K::Sym, -1, {}, t.sym});
                break;
            case Term::Kind::Wildcard:
                out.args.push_back(STerm{STerm::K::Var, fresh_var(), {}, {}});
                break;
            }
        }
        return out;
    }

    static Term to_term(const STerm& t) {
        switch (t.k) {
        case STerm::K::Obj: return Term::object(t.obj);
        case STerm::K::Sym: return Term::symbol(t.sym);
        case STerm::K::Var:
            return Term::var(intern("_V" + std::to_string(t.var)));
        }
        return Term::symbol(kNoSymbol);
    }

    Literal snapshot(const SLit& l) const {
        Literal out;
        out.naf = l.naf;
        out.negated = l.negated;
        out.predicate = l.pred;
        out.relation = l.rel;
        out.args.reserve(l.args.size());
        for (const STerm& t : l.args)
            out.args.push_back(to_term(walk(t)));
        return out;
    }

    bool is_ground(const SLit& l) const {
        for (const STerm& t : l.args)
            if (walk(t).k == STerm::K::Var)
                return false;
        return true;
    }

    std::string ground_key(const SLit& l) const {
        std::string key = l.negated ? "-" : "";
        key += symbol_name(l.pred);
        for (const STerm& t : l.args) {
            STerm w = walk(t);
            key += w.k == STerm::K::Obj ? "/" + render_object(w.obj)
                                        : "/" + symbol_name(w.sym);
        }
        return key;
    }

    // ---- resolution ----

    // Proves goals[idx..]; calls k once per solution. Returns false when the
    // sink below requested a stop.
    bool solve_seq(const std::vector<SLit>& goals, std::size_t idx, int depth,
                   std::vector<Derivation>& derivs,
                   const std::function<bool()>& k) {
        if (idx == goals.size())
            return k();
        return solve_one(goals[idx], depth, [&](Derivation&& d) {
            derivs.push_back(std::move(d));
            bool cont = solve_seq(goals, idx + 1, depth, derivs, k);
            derivs.pop_back();
            return cont;
        });
    }

    bool solve_one(const SLit& goal, int depth,
                   const std::function<bool(Derivation&&)>& k) {
        if (goal.pred == neq_symbol())
            return solve_neq(goal, k);
        if (goal.naf)
            return solve_naf(goal, depth, k);
        if (goal.rel)
            return solve_state(goal, k);
        return solve_static(goal, depth, k);
    }

    bool solve_neq(const SLit& goal, const std::function<bool(Derivation&&)>& k) {
        STerm a = walk(goal.args[0]), b = walk(goal.args[1]);
        if (a.k == STerm::K::Var || b.k == STerm::K::Var)
            throw NonGroundNaf("inequality over an unbound variable: " +
                               render_literal(snapshot(goal)));
        bool differ = a.k != b.k || (a.k == STerm::K::Obj ? !(a.obj == b.obj)
                                                          : a.sym != b.sym);
        if (!differ)
            return true;
        Derivation d;
        d.kind = Derivation::Kind::Builtin;
        d.conclusion = snapshot(goal);
        return k(std::move(d));
    }

    bool solve_naf(const SLit& goal, int depth,
                   const std::function<bool(Derivation&&)>& k) {
        if (!is_ground(goal))
            throw NonGroundNaf("naf literal not ground at call time: " +
                               render_literal(snapshot(goal)));
        SLit positive = goal;
        positive.naf = false;
        bool exists = false;
        solve_one(positive, depth, [&](Derivation&&) {
            exists = true;
            return false;
        });
        if (exists)
            return true;
        Derivation d;
        d.kind = Derivation::Kind::Naf;
        d.conclusion = snapshot(goal);
        return k(std::move(d));
    }

    bool solve_state(const SLit& goal,
                     const std::function<bool(Derivation&&)>& k) {
        const auto& tuples = s_.list(*goal.rel);
        for (const Tuple& t : tuples) {
            if (t.size() != goal.args.size())
                continue;
            std::size_t m = mark();
            bool ok = true;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (!unify(goal.args[i], STerm{STerm::K::Obj, -1, t[i], {}})) {
                    ok = false;
                    break;
                }
            if (ok) {
                Derivation d;
                d.kind = Derivation::Kind::State;
                d.conclusion = snapshot(goal);
                if (!k(std::move(d))) {
                    undo(m);
                    return false;
                }
            }
            undo(m);
        }
        return true;
    }

    bool solve_static(const SLit& goal, int depth,
                      const std::function<bool(Derivation&&)>& k) {
        bool ground = is_ground(goal);
        if (ground) {
            auto it = memo_.find(ground_key(goal));
            if (it != memo_.end()) {
                if (!it->second.has_value())
                    return true; // cached failure
                Derivation copy = *it->second;
                return k(std::move(copy));
            }
        }
        bool found = false;
        Derivation first_proof;
        bool stopped = enumerate_static(goal, depth, [&](Derivation&& d) {
            if (!found) {
                found = true;
                first_proof = d;
            }
            if (ground)
                return false; // one proof suffices for a ground call
            return k(std::move(d));
        });
        if (ground) {
            memo_.emplace(ground_key(goal),
                          found ? std::optional<Derivation>(first_proof)
                                : std::nullopt);
            if (found)
                return k(std::move(first_proof));
            return true;
        }
        return !stopped ? false : true;
    }

    bool enumerate_static(const SLit& goal, int depth,
                          const std::function<bool(Derivation&&)>& k) {
        // Clauses in global declaration order.
        for (std::size_t ci = 0; ci < p_.clauses.size(); ++ci) {
            const Rule& c = p_.clauses[ci];
            if (c.is_constraint || c.head.predicate != goal.pred ||
                c.head.negated != goal.negated ||
                c.head.args.size() != goal.args.size())
                continue;
            if (depth + 1 > opt_.depth_limit)
                throw DepthExceeded("recursion depth limit " +
                                    std::to_string(opt_.depth_limit) +
                                    " hit while proving " +
                                    render_literal(snapshot(goal)));
            std::size_t m = mark();
            std::map<Symbol, int> local;
            SLit head = convert(c.head, local);
            bool ok = true;
            for (std::size_t i = 0; i < head.args.size(); ++i)
                if (!unify(goal.args[i], head.args[i])) {
                    ok = false;
                    break;
                }
            if (ok) {
                std::vector<SLit> body;
                body.reserve(c.body.size());
                for (const Literal& l : c.body)
                    body.push_back(convert(l, local));
                std::vector<Derivation> children;
                bool cont = solve_seq(body, 0, depth + 1, children, [&]() {
                    Derivation d;
                    d.kind = c.body.empty() ? Derivation::Kind::Fact
                                            : Derivation::Kind::Rule;
                    d.conclusion = snapshot(goal);
                    d.clause_index = ci;
                    d.children = children;
                    return k(std::move(d));
                });
                if (!cont) {
                    undo(m);
                    return false;
                }
            }
            undo(m);
        }
        // Then the fact base, in dump order.
        for (const StaticFact& fact : f_.statics) {
            if (fact.predicate != goal.pred || fact.negated != goal.negated)
                continue;
            std::size_t expected = fact.class_arg != kNoSymbol ? 2u : 1u;
            if (goal.args.size() != expected)
                continue;
            std::size_t m = mark();
            bool ok = unify(goal.args[0], STerm{STerm::K::Obj, -1, fact.subject, {}});
            if (ok && expected == 2)
                ok = unify(goal.args[1], STerm{STerm::K::Sym, -1, {}, fact.class_arg});
            if (ok) {
                Derivation d;
                d.kind = Derivation::Kind::Fact;
                d.conclusion = snapshot(goal);
                if (!k(std::move(d))) {
                    undo(m);
                    return false;
                }
            }
            undo(m);
        }
        return true;
    }

    const Program& p_;
    const FactBase& f_;
    const StateRecord& s_;
    SolveOptions opt_;
    Symbol type_sym_;
    std::vector<std::optional<STerm>> env_;
    std::vector<int> trail_;
    std::unordered_map<std::string, std::optional<Derivation>> memo_;
};

void render_node(const Derivation& d, int indent, std::ostringstream& os) {
    for (int i = 0; i < indent; ++i)
        os << "  ";
    os << render_literal(d.conclusion);
    switch (d.kind) {
    case Derivation::Kind::Fact: os << "  [fact]"; break;
    case Derivation::Kind::Rule: os << "  [rule " << d.clause_index << "]"; break;
    case Derivation::Kind::State: os << "  [state]"; break;
    case Derivation::Kind::Naf: os << "  [naf]"; break;
    case Derivation::Kind::Builtin: os << "  [builtin]"; break;
    }
    os << '\n';
    for (const Derivation& c : d.children)
        render_node(c, indent + 1, os);
}

} // namespace

std::string render_derivation(const Derivation& d) {
    std::ostringstream os;
    render_node(d, 0, os);
    return os.str();
}

std::vector<Answer> solve(const Program& p, const FactBase& f,
                          const StateRecord& s,
                          const std::vector<Literal>& query,
                          const SolveOptions& opt) {
    std::vector<Answer> out;
    Solver solver(p, f, s, opt);
    solver.run(query, [&](const Binding& b, Derivation&& d) {
        out.push_back(Answer{b, std::move(d)});
        return true;
    });
    return out;
}

std::optional<Answer> solve_first(const Program& p, const FactBase& f,
                                  const StateRecord& s,
                                  const std::vector<Literal>& query,
                                  const SolveOptions& opt) {
    std::optional<Answer> out;
    Solver solver(p, f, s, opt);
    solver.run(query, [&](const Binding& b, Derivation&& d) {
        out = Answer{b, std::move(d)};
        return false;
    });
    return out;
}

bool provable(const Program& p, const FactBase& f, const StateRecord& s,
              const std::vector<Literal>& query, const SolveOptions& opt) {
    return solve_first(p, f, s, query, opt).has_value();
}

std::optional<ConstraintWitness>
violates_constraints(const Program& p, const FactBase& f, const StateRecord& s,
                     const SolveOptions& opt) {
    for (std::size_t i = 0; i < p.clauses.size(); ++i) {
        const Rule& c = p.clauses[i];
        if (!c.is_constraint)
            continue;
        if (auto a = solve_first(p, f, s, c.body, opt))
            return ConstraintWitness{i, c, a->binding};
    }
    return std::nullopt;
}

namespace {

struct PredKey {
    Symbol pred = kNoSymbol;
    bool negated = false;

    bool operator==(const PredKey&) const = default;
    bool operator<(const PredKey& o) const {
        return pred != o.pred ? pred < o.pred : negated < o.negated;
    }
};

std::string key_name(const PredKey& k) {
    return (k.negated ? "-" : "") + symbol_name(k.pred);
}

} // namespace

std::optional<std::string> naf_cycle(const Program& p) {
    struct Edge {
        int to;
        bool negative;
    };
    std::map<PredKey, int> index_of;
    std::vector<PredKey> keys;
    std::vector<std::vector<Edge>> adj;
    auto node = [&](const PredKey& k) {
        auto [it, fresh] = index_of.try_emplace(k, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(k);
            adj.emplace_back();
        }
        return it->second;
    };
    for (const Rule& r : p.clauses) {
        if (r.is_constraint)
            continue;
        int h = node(PredKey{r.head.predicate, r.head.negated});
        for (const Literal& l : r.body) {
            if (l.predicate == neq_symbol() || l.relation)
                continue; // builtins and state literals have no rules
            int b = node(PredKey{l.predicate, l.negated});
            adj[h].push_back(Edge{b, l.naf});
        }
    }
    int n = static_cast<int>(keys.size());

    // Tarjan SCC; recursion through negation is a negative edge whose ends
    // share a component.
    std::vector<int> comp(n, -1), low(n), num(n, -1), stack;
    std::vector<char> on_stack(n, 0);
    int counter = 0, ncomp = 0;
    std::function<void(int)> strongconnect = [&](int v) {
        num[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
        for (const Edge& e : adj[v]) {
            if (num[e.to] < 0) {
                strongconnect(e.to);
                low[v] = std::min(low[v], low[e.to]);
            } else if (on_stack[e.to]) {
                low[v] = std::min(low[v], num[e.to]);
            }
        }
        if (low[v] == num[v]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp[w] = ncomp;
                if (w == v)
                    break;
            }
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[v] < 0)
            strongconnect(v);

    for (int u = 0; u < n; ++u) {
        for (const Edge& e : adj[u]) {
            if (!e.negative || comp[u] != comp[e.to])
                continue;
            // Recover a concrete loop: shortest path e.to -> u inside the
            // component, prefixed by the offending negative edge.
            std::vector<int> prev(n, -1);
            std::vector<int> queue{e.to};
            prev[e.to] = e.to;
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                int v = queue[qi];
                for (const Edge& f : adj[v])
                    if (comp[f.to] == comp[u] && prev[f.to] < 0) {
                        prev[f.to] = v;
                        queue.push_back(f.to);
                    }
            }
            std::vector<int> path;
            for (int v = u; v != e.to; v = prev[v])
                path.push_back(v);
            std::reverse(path.begin(), path.end()); // nodes after e.to, up to u
            std::ostringstream os;
            os << key_name(keys[u]) << " -> not " << key_name(keys[e.to]);
            for (int v : path)
                os << " -> " << key_name(keys[v]);
            return os.str();
        }
    }
    return std::nullopt;
}

} // namespace vecsr
