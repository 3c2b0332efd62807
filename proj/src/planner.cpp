#include "vecsr/planner.hpp"

#include "vecsr/parser.hpp"
#include "vecsr/scene.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace vecsr {

namespace {

using Clock = std::chrono::steady_clock;
using ObjectSet = std::unordered_set<ObjectId, ObjectHash>;

ObjectSet room_objects(const FactBase& f) {
    ObjectSet rooms;
    for (std::size_t i = 0; i < f.statics.size(); ++i)
        if (f.classes[i] == FactClass::Category &&
            f.statics[i].predicate == rooms_category())
            rooms.insert(f.statics[i].subject);
    return rooms;
}

// Substitute schema parameters with the ground arguments; existential
// variables stay untouched.
Literal bind_literal(const Literal& l, const std::vector<Symbol>& params,
                     const std::vector<ObjectId>& args) {
    Literal out = l;
    for (Term& t : out.args) {
        if (t.kind != Term::Kind::Var)
            continue;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i] == t.sym) {
                t = Term::object(args[i]);
                break;
            }
    }
    return out;
}

std::vector<Literal> bind_body(const std::vector<Literal>& body,
                               const std::vector<Symbol>& params,
                               const std::vector<ObjectId>& args) {
    std::vector<Literal> out;
    out.reserve(body.size());
    for (const Literal& l : body)
        out.push_back(bind_literal(l, params, args));
    return out;
}

std::string action_key(const GroundAction& a) {
    std::string k = symbol_name(a.schema);
    for (const ObjectId& o : a.args) {
        k += '|';
        k += render_object(o);
    }
    return k;
}

bool args_less(const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (object_less(a[i], b[i]))
            return true;
        if (object_less(b[i], a[i]))
            return false;
    }
    return a.size() < b.size();
}

// Support-chain proximity: walking close to x also brings the agent close to
// the surfaces and containers x rests in and to everything resting on or in
// x, transitively, but chains never cross room boundaries.
void add_close_with_closure(StateRecord& s, const ObjectId& target,
                            const ObjectSet& rooms) {
    s.add(RelationKind::Close, {target});
    if (rooms.count(target))
        return;
    ObjectSet seen{target};
    std::vector<ObjectId> work{target};
    while (!work.empty()) {
        ObjectId cur = work.back();
        work.pop_back();
        for (RelationKind k : {RelationKind::OnTopOf, RelationKind::Inside}) {
            for (const Tuple& t : s.list(k)) {
                if (t.size() != 2)
                    continue;
                ObjectId next{};
                if (t[0] == cur)
                    next = t[1]; // the thing cur rests on / in
                else if (t[1] == cur)
                    next = t[0]; // the thing resting on / in cur
                else
                    continue;
                if (rooms.count(next) || is_agent(next) || seen.count(next))
                    continue;
                seen.insert(next);
                work.push_back(next);
                s.add(RelationKind::Close, {next});
            }
        }
    }
}

StateRecord apply_effects(const ActionSchema& sc, const GroundAction& a,
                          const StateRecord& s, const ObjectSet& rooms) {
    StateRecord out = s;

    auto ground_arg = [&](const Term& t) -> ObjectId {
        if (t.kind == Term::Kind::Object)
            return t.obj;
        if (t.kind == Term::Kind::Var) {
            for (std::size_t i = 0; i < sc.params.size(); ++i)
                if (sc.params[i] == t.sym)
                    return a.args[i];
        }
        throw IllegalAction("non-object effect argument in " +
                            symbol_name(sc.name));
    };

    for (const Effect& e : sc.del) {
        auto& list = out.list(e.relation);
        std::vector<Tuple> kept;
        for (const Tuple& t : list) {
            bool match = t.size() == e.args.size();
            for (std::size_t i = 0; match && i < t.size(); ++i) {
                if (e.args[i].kind == Term::Kind::Wildcard)
                    continue;
                if (ground_arg(e.args[i]) != t[i])
                    match = false;
            }
            if (!match)
                kept.push_back(t);
        }
        list = std::move(kept);
    }

    for (const Effect& e : sc.add) {
        Tuple t;
        for (const Term& arg : e.args)
            t.push_back(ground_arg(arg));
        if (e.relation == RelationKind::Close && t.size() == 1)
            add_close_with_closure(out, t[0], rooms);
        else
            out.add(e.relation, t);
    }
    return out;
}

// Satisfaction of one ground goal literal in a state.
bool literal_met(const Literal& l, const StateRecord& s, const CompiledKB& kb) {
    if (l.relation) {
        Tuple t;
        for (const Term& a : l.args) {
            if (a.kind != Term::Kind::Object)
                return false;
            t.push_back(a.obj);
        }
        bool in_state = s.contains(*l.relation, t);
        return l.naf ? !in_state : in_state;
    }
    return provable(kb.program, kb.facts, s, {l});
}

bool literal_ground(const Literal& l) {
    for (const Term& t : l.args)
        if (!t.is_ground())
            return false;
    return true;
}

// Ground instantiations of the goal: the goal itself when ground, otherwise
// one instance per solution of its static constraints.
std::vector<std::vector<Literal>> goal_instances(const std::vector<Literal>& goal,
                                                 const CompiledKB& kb) {
    bool all_ground = true;
    for (const Literal& l : goal)
        all_ground &= literal_ground(l);

    std::vector<std::vector<Literal>> instances;
    if (all_ground) {
        instances.push_back(goal);
        return instances;
    }
    std::vector<Literal> statics;
    for (const Literal& l : goal)
        if (!l.relation && !l.naf && l.predicate != neq_symbol())
            statics.push_back(l);
    if (statics.empty()) {
        instances.push_back(goal);
        return instances;
    }
    for (const Answer& a :
         solve(kb.program, kb.facts, kb.facts.state, statics)) {
        std::vector<Literal> inst;
        for (const Literal& l : goal) {
            Literal b = l;
            for (Term& t : b.args)
                if (t.kind == Term::Kind::Var) {
                    auto it = a.binding.find(t.sym);
                    if (it != a.binding.end())
                        t = it->second;
                }
            inst.push_back(b);
        }
        instances.push_back(std::move(inst));
    }
    return instances;
}

std::vector<Literal>
targets_of_instances(const std::vector<std::vector<Literal>>& instances) {
    std::vector<Literal> targets;
    for (const auto& inst : instances)
        for (const Literal& l : inst)
            if (literal_ground(l) &&
                std::find(targets.begin(), targets.end(), l) == targets.end())
                targets.push_back(l);
    return targets;
}

std::vector<Literal> goal_targets(const std::vector<Literal>& goal,
                                  const CompiledKB& kb) {
    return targets_of_instances(goal_instances(goal, kb));
}

std::set<Symbol> state_tainted_preds(const Program& p);
bool literal_state_free(const Literal& l, const std::set<Symbol>& tainted);

struct Generated {
    std::size_t schema_index;
    GroundAction action;
};

// Ground completions of a schema whose effect unified against a target
// literal: bound parameters come from unification, the rest from solving the
// (partially bound) preconditions.
void complete_candidates(const CompiledKB& kb, const StateRecord& s,
                         std::size_t si,
                         const std::map<Symbol, ObjectId>& partial,
                         std::vector<Generated>& out) {
    const ActionSchema& sc = kb.program.actions[si];
    bool full = true;
    for (Symbol p : sc.params)
        if (!partial.count(p))
            full = false;
    if (full) {
        GroundAction ga{sc.name, {}};
        for (Symbol p : sc.params)
            ga.args.push_back(partial.at(p));
        out.push_back({si, std::move(ga)});
        return;
    }

    std::vector<Literal> pres;
    for (const Literal& l : sc.pre) {
        Literal b = l;
        for (Term& t : b.args)
            if (t.kind == Term::Kind::Var) {
                auto it = partial.find(t.sym);
                if (it != partial.end())
                    t = Term::object(it->second);
            }
        pres.push_back(b);
    }
    try {
        for (const Answer& ans : solve(kb.program, kb.facts, s, pres)) {
            GroundAction ga{sc.name, {}};
            bool ok = true;
            for (Symbol p : sc.params) {
                auto fixed = partial.find(p);
                if (fixed != partial.end()) {
                    ga.args.push_back(fixed->second);
                    continue;
                }
                auto it = ans.binding.find(p);
                if (it == ans.binding.end() ||
                    it->second.kind != Term::Kind::Object) {
                    ok = false;
                    break;
                }
                ga.args.push_back(it->second.obj);
            }
            if (ok)
                out.push_back({si, std::move(ga)});
        }
    } catch (const NonGroundNaf&) {
        // Parameters this schema cannot bind from its positive preconditions;
        // only full unification can ground it.
    }
}

// Unify an effect pattern against a (ground or partial) target literal.
// Wildcards constrain nothing; a free target variable links to the schema
// parameter at its position so context constraints can follow the binding.
bool unify_effect(const ActionSchema& sc, const Effect& e, const Literal& target,
                  std::map<Symbol, ObjectId>& binding,
                  std::map<Symbol, Symbol>* links = nullptr) {
    if (target.relation != e.relation || target.args.size() != e.args.size())
        return false;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        const Term& et = e.args[i];
        const Term& gt = target.args[i];
        if (et.kind == Term::Kind::Wildcard)
            continue;
        if (gt.kind == Term::Kind::Var) {
            if (links && et.kind == Term::Kind::Var &&
                std::find(sc.params.begin(), sc.params.end(), et.sym) !=
                    sc.params.end() &&
                !links->count(et.sym))
                (*links)[et.sym] = gt.sym;
            continue;
        }
        if (gt.kind != Term::Kind::Object)
            return false;
        if (et.kind == Term::Kind::Object) {
            if (et.obj != gt.obj)
                return false;
        } else if (et.kind == Term::Kind::Var) {
            bool is_param = std::find(sc.params.begin(), sc.params.end(),
                                      et.sym) != sc.params.end();
            if (!is_param)
                return false;
            auto it = binding.find(et.sym);
            if (it != binding.end()) {
                if (it->second != gt.obj)
                    return false;
            } else {
                binding[et.sym] = gt.obj;
            }
        }
    }
    return true;
}

// A regression aim: a relation-bearing literal a candidate effect should add
// (or delete, when naf is set), plus static constraints on its free variables
// inherited from the rule bodies it was derived through.
struct Aim {
    Literal lit;
    std::vector<Literal> context;
};

// Regress a literal through the rule base until relation-bearing aims emerge.
// want_true false asks for ways to falsify the literal instead; a naf body
// conjunct flips the polarity of the subgoal beneath it.
void expand_goal_aims(const CompiledKB& kb, const std::set<Symbol>& tainted,
                      const Literal& seed, bool want_true,
                      std::vector<Aim>& out, std::set<std::string>& seen) {
    struct Frame {
        Literal lit;
        bool want;
        int depth;
        std::vector<Literal> ctx;
    };
    std::vector<Frame> work{{seed, want_true, 0, {}}};
    std::set<std::string> expanded;

    while (!work.empty() && out.size() < 48) {
        Frame f = std::move(work.back());
        work.pop_back();
        if (f.lit.predicate == neq_symbol())
            continue;

        if (f.lit.relation) {
            Aim a;
            a.lit = f.lit;
            a.lit.naf = !f.want;
            a.context = std::move(f.ctx);
            if (seen.insert(render_literal(a.lit)).second)
                out.push_back(std::move(a));
            continue;
        }

        std::string guard = symbol_name(f.lit.predicate) +
                            (f.lit.negated ? "~" : "") + (f.want ? "+" : "-");
        if (f.depth >= 3 || !expanded.insert(guard).second)
            continue;

        for (const Rule& r : kb.program.clauses) {
            if (r.is_constraint || r.head.predicate != f.lit.predicate ||
                r.head.negated != f.lit.negated ||
                r.head.args.size() != f.lit.args.size())
                continue;
            std::map<Symbol, Term> sub;
            bool ok = true;
            for (std::size_t i = 0; ok && i < r.head.args.size(); ++i) {
                const Term& h = r.head.args[i];
                const Term& g = f.lit.args[i];
                if (h.kind == Term::Kind::Var)
                    sub.emplace(h.sym, g);
                else if (h.kind == Term::Kind::Object &&
                         g.kind == Term::Kind::Object && h.obj != g.obj)
                    ok = false;
            }
            if (!ok)
                continue;

            std::vector<Literal> body;
            for (const Literal& b : r.body) {
                Literal l = b;
                for (Term& t : l.args)
                    if (t.kind == Term::Kind::Var && sub.count(t.sym))
                        t = sub.at(t.sym);
                body.push_back(std::move(l));
            }
            std::vector<Literal> ctx = f.ctx;
            for (const Literal& l : body)
                if (!l.naf && literal_state_free(l, tainted))
                    ctx.push_back(l);
            for (const Literal& l : body) {
                if (!l.naf && literal_state_free(l, tainted))
                    continue; // context, not a subgoal
                Literal core = l;
                core.naf = false;
                work.push_back({std::move(core), f.want != l.naf, f.depth + 1,
                                ctx});
            }
        }
    }
}

// Ground completions driven by the state-independent preconditions plus the
// aim's context: used when an effect unification leaves parameters free and
// the full preconditions do not hold yet anywhere.
void complete_with_statics(const CompiledKB& kb, const StateRecord& s,
                           std::size_t si,
                           const std::map<Symbol, ObjectId>& partial,
                           const std::map<Symbol, Symbol>& links,
                           const std::vector<Literal>& context,
                           const std::set<Symbol>& tainted,
                           std::vector<Generated>& out) {
    const ActionSchema& sc = kb.program.actions[si];
    auto substitute = [&](Literal l) {
        for (Term& t : l.args)
            if (t.kind == Term::Kind::Var && partial.count(t.sym))
                t = Term::object(partial.at(t.sym));
        return l;
    };

    std::vector<Literal> conj;
    for (const Literal& l : sc.pre)
        if (!l.naf && literal_state_free(l, tainted))
            conj.push_back(substitute(l));
    for (const Literal& c : context) {
        Literal l = c;
        for (Term& t : l.args)
            if (t.kind == Term::Kind::Var)
                for (const auto& [param, tvar] : links)
                    if (tvar == t.sym) {
                        t = Term::var(param);
                        break;
                    }
        conj.push_back(substitute(l));
    }
    if (conj.empty())
        return;

    try {
        int emitted = 0;
        for (const Answer& ans : solve(kb.program, kb.facts, s, conj)) {
            GroundAction ga{sc.name, {}};
            bool ok = true;
            for (Symbol p : sc.params) {
                auto fixed = partial.find(p);
                if (fixed != partial.end()) {
                    ga.args.push_back(fixed->second);
                    continue;
                }
                auto it = ans.binding.find(p);
                if (it == ans.binding.end() ||
                    it->second.kind != Term::Kind::Object) {
                    ok = false;
                    break;
                }
                ga.args.push_back(it->second.obj);
            }
            if (ok) {
                out.push_back({si, std::move(ga)});
                if (++emitted >= 6)
                    break;
            }
        }
    } catch (const std::runtime_error&) {
        // Context too weak to ground the schema; no completions then.
    }
}

std::optional<ObjectId> room_of_state(const StateRecord& s, const ObjectId& o,
                                      const ObjectSet& rooms) {
    if (rooms.count(o))
        return o;
    ObjectSet seen;
    ObjectId cur = o;
    while (seen.insert(cur).second) {
        std::optional<ObjectId> up;
        for (RelationKind k : {RelationKind::Inside, RelationKind::OnTopOf}) {
            for (const Tuple& t : s.list(k))
                if (t.size() == 2 && t[0] == cur) {
                    up = t[1];
                    break;
                }
            if (up)
                break;
        }
        if (!up)
            return std::nullopt;
        if (rooms.count(*up))
            return *up;
        cur = *up;
    }
    return std::nullopt;
}

void dedup_sort(std::vector<Generated>& gen, std::set<std::string>& emitted) {
    std::sort(gen.begin(), gen.end(), [](const Generated& a, const Generated& b) {
        if (a.schema_index != b.schema_index)
            return a.schema_index < b.schema_index;
        return args_less(a.action.args, b.action.args);
    });
    std::vector<Generated> unique;
    for (Generated& g : gen)
        if (emitted.insert(action_key(g.action)).second)
            unique.push_back(std::move(g));
    gen = std::move(unique);
}

struct TimeoutSignal {};
struct BudgetSignal {};

} // namespace

const char* failure_reason_name(FailureReason r) {
    switch (r) {
    case FailureReason::DepthExceeded: return "depth_exceeded";
    case FailureReason::Exhausted: return "exhausted";
    case FailureReason::Timeout: return "timeout";
    case FailureReason::NoCandidateObjects: return "no_candidate_objects";
    }
    return "?";
}

std::string render_ground_action(const Program& p, const GroundAction& a) {
    const ActionSchema* sc = p.find_action(a.schema);
    std::string tag =
        sc ? symbol_name(sc->tag) : default_tag(a.schema);
    std::string out = "[" + tag + "]";
    for (const ObjectId& o : a.args) {
        out += " <";
        out += symbol_name(o.name);
        out += "> (";
        out += std::to_string(o.index);
        out += ")";
    }
    return out;
}

std::string render_plan(const Program& p, const Plan& plan) {
    std::string out;
    for (const GroundAction& a : plan.steps) {
        out += render_ground_action(p, a);
        out += '\n';
    }
    return out;
}

bool state_subset(const std::vector<Literal>& goal, const StateRecord& s,
                  const CompiledKB& kb) {
    if (goal.empty())
        return true;
    return provable(kb.program, kb.facts, s, goal);
}

LegalResult legal(const GroundAction& a, const StateRecord& s,
                  const CompiledKB& kb) {
    LegalResult res;
    const ActionSchema* sc = kb.program.find_action(a.schema);
    if (!sc) {
        res.reason = "unknown action schema " + symbol_name(a.schema);
        return res;
    }
    if (sc->params.size() != a.args.size()) {
        res.reason = "arity mismatch for " + symbol_name(a.schema);
        return res;
    }

    std::vector<Literal> pres = bind_body(sc->pre, sc->params, a.args);
    auto answer = solve_first(kb.program, kb.facts, s, pres);
    if (!answer) {
        // Walk prefixes to report the first literal that cannot be satisfied.
        for (std::size_t i = 1; i <= pres.size(); ++i) {
            std::vector<Literal> prefix(pres.begin(), pres.begin() + i);
            if (!provable(kb.program, kb.facts, s, prefix)) {
                res.failing = pres[i - 1];
                res.reason =
                    "failing precondition " + render_literal(pres[i - 1]);
                return res;
            }
        }
        res.reason = "preconditions unsatisfiable";
        return res;
    }

    StateRecord next = apply_effects(*sc, a, s, room_objects(kb.facts));
    if (auto w = violates_constraints(kb.program, kb.facts, next)) {
        std::string text = print_rule(w->constraint);
        if (!text.empty() && text.back() == '\n')
            text.pop_back();
        res.reason = "violates constraint " + text;
        for (const auto& [var, t] : w->binding)
            res.reason += " " + symbol_name(var) + "=" + render_term(t);
        return res;
    }

    res.ok = true;
    if (pres.size() <= 1) {
        if (!pres.empty())
            res.proofs.push_back(answer->derivation);
    } else {
        res.proofs = answer->derivation.children;
    }
    return res;
}

StateRecord update(const GroundAction& a, const StateRecord& s,
                   const CompiledKB& kb) {
    const ActionSchema* sc = kb.program.find_action(a.schema);
    if (!sc || sc->params.size() != a.args.size())
        throw IllegalAction("malformed action " + symbol_name(a.schema));
    std::vector<Literal> pres = bind_body(sc->pre, sc->params, a.args);
    if (!provable(kb.program, kb.facts, s, pres))
        throw IllegalAction("preconditions not established for " +
                            symbol_name(a.schema));
    return apply_effects(*sc, a, s, room_objects(kb.facts));
}

std::vector<Candidate> enumerate_candidates(const StateRecord& s,
                                            const std::vector<Literal>& goal,
                                            const CompiledKB& kb) {
    const ObjectSet rooms = room_objects(kb.facts);
    const std::set<Symbol> tainted = state_tainted_preds(kb.program);
    std::vector<Candidate> stream;
    std::set<std::string> emitted;

    std::vector<Literal> targets = goal_targets(goal, kb);
    std::vector<Literal> unmet;
    for (const Literal& l : targets)
        if (!literal_met(l, s, kb))
            unmet.push_back(l);

    std::set<std::string> aim_keys;
    auto to_aims = [&](const std::vector<Literal>& lits) {
        std::vector<Aim> aims;
        for (const Literal& l : lits) {
            Literal core = l;
            core.naf = false;
            expand_goal_aims(kb, tainted, core, !l.naf, aims, aim_keys);
        }
        return aims;
    };

    auto generate_for = [&](const std::vector<Aim>& aims,
                            std::vector<Generated>& out) {
        for (std::size_t si = 0; si < kb.program.actions.size(); ++si) {
            const ActionSchema& sc = kb.program.actions[si];
            for (const Aim& aim : aims) {
                const auto& effects = aim.lit.naf ? sc.del : sc.add;
                for (const Effect& e : effects) {
                    std::map<Symbol, ObjectId> binding;
                    std::map<Symbol, Symbol> links;
                    if (!unify_effect(sc, e, aim.lit, binding, &links))
                        continue;
                    complete_candidates(kb, s, si, binding, out);
                    bool full = true;
                    for (Symbol p : sc.params)
                        if (!binding.count(p))
                            full = false;
                    if (!full)
                        complete_with_statics(kb, s, si, binding, links,
                                              aim.context, tainted, out);
                }
            }
        }
    };

    auto emit_tier = [&](std::vector<Generated>& gen, int tier,
                         std::vector<Literal>* failings = nullptr) {
        dedup_sort(gen, emitted);
        for (Generated& g : gen) {
            Candidate c;
            c.tier = tier;
            c.schema_index = g.schema_index;
            c.action = std::move(g.action);
            LegalResult lr = legal(c.action, s, kb);
            c.is_legal = lr.ok;
            c.reject_reason = lr.reason;
            c.proofs = std::move(lr.proofs);
            if (!lr.ok && failings && lr.failing &&
                std::find(failings->begin(), failings->end(), *lr.failing) ==
                    failings->end())
                failings->push_back(*lr.failing);
            stream.push_back(std::move(c));
        }
    };

    // Tier 1: actions whose effects satisfy an unmet goal literal.
    std::vector<Generated> t1;
    generate_for(to_aims(unmet), t1);
    std::size_t tier1_begin = stream.size();
    std::vector<Literal> failing;
    emit_tier(t1, 1, &failing);

    // Tier 2: actions establishing a failing precondition of a tier-1
    // candidate (one level of regression).
    std::vector<Generated> t2;
    generate_for(to_aims(failing), t2);
    emit_tier(t2, 2);

    // Tier 3: navigation reducing distance to tier-1/2 objects: approach
    // moves for out-of-reach objects in the agent's room, room changes for
    // the rest.
    std::vector<ObjectId> involved;
    for (std::size_t i = tier1_begin; i < stream.size(); ++i)
        for (const ObjectId& o : stream[i].action.args)
            if (!is_agent(o) &&
                std::find(involved.begin(), involved.end(), o) ==
                    involved.end())
                involved.push_back(o);
    std::sort(involved.begin(), involved.end(), object_less);

    std::optional<ObjectId> agent_room;
    for (const Tuple& t : s.list(RelationKind::Inside))
        if (t.size() == 2 && is_agent(t[0]) && rooms.count(t[1])) {
            agent_room = t[1];
            break;
        }

    std::vector<ObjectId> approach;
    std::vector<ObjectId> nav_rooms;
    for (const ObjectId& o : involved) {
        auto r = room_of_state(s, o, rooms);
        if (!r)
            continue;
        if (agent_room && *r == *agent_room) {
            if (!rooms.count(o) && !s.contains(RelationKind::Close, {o}))
                approach.push_back(o);
        } else if (std::find(nav_rooms.begin(), nav_rooms.end(), *r) ==
                   nav_rooms.end()) {
            nav_rooms.push_back(*r);
        }
    }
    std::sort(nav_rooms.begin(), nav_rooms.end(), object_less);

    std::vector<Generated> t3;
    for (std::size_t si = 0; si < kb.program.actions.size(); ++si) {
        const ActionSchema& sc = kb.program.actions[si];
        if (sc.params.size() != 1)
            continue;
        bool room_nav = false;
        bool approaches = false;
        for (const Effect& e : sc.add) {
            if (e.relation == RelationKind::Inside && e.args.size() == 2 &&
                e.args[0].kind == Term::Kind::Object &&
                is_agent(e.args[0].obj) && e.args[1].kind == Term::Kind::Var)
                room_nav = true;
            if (e.relation == RelationKind::Close && e.args.size() == 1 &&
                e.args[0].kind == Term::Kind::Var &&
                e.args[0].sym == sc.params[0])
                approaches = true;
        }
        if (room_nav)
            for (const ObjectId& r : nav_rooms)
                t3.push_back({si, GroundAction{sc.name, {r}}});
        else if (approaches)
            for (const ObjectId& o : approach)
                t3.push_back({si, GroundAction{sc.name, {o}}});
    }
    emit_tier(t3, 3);

    // Tier 4: every remaining legal action, schema order then object order.
    std::vector<Generated> t4;
    for (std::size_t si = 0; si < kb.program.actions.size(); ++si) {
        const ActionSchema& sc = kb.program.actions[si];
        try {
            for (const Answer& ans :
                 solve(kb.program, kb.facts, s, sc.pre)) {
                GroundAction ga{sc.name, {}};
                bool ok = true;
                for (Symbol p : sc.params) {
                    auto it = ans.binding.find(p);
                    if (it == ans.binding.end() ||
                        it->second.kind != Term::Kind::Object) {
                        ok = false;
                        break;
                    }
                    ga.args.push_back(it->second.obj);
                }
                if (ok)
                    t4.push_back({si, std::move(ga)});
            }
        } catch (const NonGroundNaf&) {
            // Schema parameters unbound by positive preconditions.
        }
    }
    emit_tier(t4, 4);

    return stream;
}

std::vector<GroundAction> choose_action(const StateRecord& s,
                                        const std::vector<Literal>& goal,
                                        const CompiledKB& kb) {
    std::vector<GroundAction> out;
    for (Candidate& c : enumerate_candidates(s, goal, kb))
        if (c.is_legal)
            out.push_back(std::move(c.action));
    return out;
}

namespace {

// Predicates whose truth can never change with the dynamic state: no clause
// in their closure touches a dynamic relation.
std::set<Symbol> state_tainted_preds(const Program& p) {
    std::set<Symbol> preds;
    for (const Rule& c : p.clauses)
        if (!c.is_constraint)
            preds.insert(c.head.predicate);
    // Predicates with no clauses (pure fact-base predicates) are state-free;
    // start from "all static preds" and strike out the tainted ones.
    bool changed = true;
    std::set<Symbol> tainted;
    while (changed) {
        changed = false;
        for (const Rule& c : p.clauses) {
            if (c.is_constraint || tainted.count(c.head.predicate))
                continue;
            for (const Literal& b : c.body)
                if (b.relation || tainted.count(b.predicate)) {
                    tainted.insert(c.head.predicate);
                    changed = true;
                    break;
                }
        }
    }
    return tainted; // NB: returns the tainted set; callers test absence
}

bool literal_state_free(const Literal& l, const std::set<Symbol>& tainted) {
    return !l.relation && l.predicate != neq_symbol() &&
           !tainted.count(l.predicate);
}

// Sound fast-fail: a positive dynamic goal literal is unreachable when every
// schema whose effect could produce it is ruled out by its state-independent
// preconditions (those can never become true later). A multi-instance goal is
// unreachable only when every instance carries such a literal.
bool literal_producible(const Literal& g, const StateRecord& s0,
                        const CompiledKB& kb,
                        const std::set<Symbol>& tainted) {
    for (const ActionSchema& sc : kb.program.actions) {
        const auto& effects = g.naf ? sc.del : sc.add;
        for (const Effect& e : effects) {
            std::map<Symbol, ObjectId> binding;
            if (!unify_effect(sc, e, g, binding))
                continue;
            std::vector<Literal> invariant;
            for (const Literal& l : sc.pre) {
                if (!literal_state_free(l, tainted) || l.naf)
                    continue;
                Literal b = l;
                for (Term& t : b.args)
                    if (t.kind == Term::Kind::Var && binding.count(t.sym))
                        t = Term::object(binding.at(t.sym));
                invariant.push_back(b);
            }
            if (invariant.empty() ||
                provable(kb.program, kb.facts, s0, invariant))
                return true;
        }
    }
    return false;
}

std::optional<Literal>
unreachable_goal_literal(const std::vector<std::vector<Literal>>& instances,
                         const StateRecord& s0, const CompiledKB& kb) {
    std::set<Symbol> tainted = state_tainted_preds(kb.program);
    std::optional<Literal> witness;
    for (const auto& inst : instances) {
        std::optional<Literal> dead;
        for (const Literal& g : inst) {
            if (!g.relation || !literal_ground(g) || literal_met(g, s0, kb))
                continue;
            if (!literal_producible(g, s0, kb, tainted)) {
                dead = g;
                break;
            }
        }
        if (!dead)
            return std::nullopt; // this instance might be reachable
        if (!witness)
            witness = dead;
    }
    return witness;
}

// Dynamic relations positively required by the goal's action closure but
// produced by no schema: the missing-capability diagnostic.
std::vector<std::string> capability_gaps(const CompiledKB& kb) {
    std::set<RelationKind> needed;
    std::set<Symbol> needed_preds;

    auto note_literal = [&](const Literal& l) {
        if (l.naf)
            return;
        if (l.relation)
            needed.insert(*l.relation);
        else if (l.predicate != neq_symbol())
            needed_preds.insert(l.predicate);
    };

    for (const Literal& l : kb.goal)
        note_literal(l);

    bool changed = true;
    while (changed) {
        changed = false;
        std::set<RelationKind> rels = needed;
        std::set<Symbol> preds = needed_preds;
        for (const Rule& c : kb.program.clauses) {
            if (c.is_constraint || !needed_preds.count(c.head.predicate))
                continue;
            for (const Literal& b : c.body)
                note_literal(b);
        }
        for (const ActionSchema& sc : kb.program.actions) {
            bool relevant = false;
            for (const Effect& e : sc.add)
                relevant |= needed.count(e.relation) > 0;
            for (const Effect& e : sc.del)
                relevant |= needed.count(e.relation) > 0;
            if (!relevant)
                continue;
            for (const Literal& l : sc.pre)
                note_literal(l);
        }
        changed = rels != needed || preds != needed_preds;
    }

    std::set<RelationKind> producible;
    for (const ActionSchema& sc : kb.program.actions)
        for (const Effect& e : sc.add)
            producible.insert(e.relation);

    std::vector<std::string> gaps;
    for (RelationKind r : needed)
        if (!producible.count(r))
            gaps.push_back(std::string("no schema adds ") + relation_name(r) +
                           "(_)");
    return gaps;
}

} // namespace

PlanResult plan(const CompiledKB& kb, const TaskDef& task,
                const PlanLimits& limits) {
    PlanResult res;
    auto start = Clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    const std::vector<Literal>& goal = kb.goal;
    const StateRecord& s0 = kb.facts.state;

    // A goal whose objects are absent can never start: vacuous target lists
    // with a non-empty goal mean nothing to aim for.
    std::vector<std::vector<Literal>> instances = goal_instances(goal, kb);
    std::vector<Literal> targets = targets_of_instances(instances);
    if (!goal.empty() && targets.empty()) {
        res.failure = PlanFailure{FailureReason::NoCandidateObjects,
                                  "no objects satisfy the goal constraints",
                                  {}};
        res.seconds = elapsed();
        return res;
    }

    if (state_subset(goal, s0, kb)) {
        res.plan = Plan{{}, task.name, kb.level};
        res.seconds = elapsed();
        return res;
    }

    if (auto dead = unreachable_goal_literal(instances, s0, kb)) {
        PlanFailure f;
        f.reason = FailureReason::Exhausted;
        f.detail = "goal literal unreachable: " + render_literal(*dead);
        f.capability_gaps = capability_gaps(kb);
        res.failure = std::move(f);
        res.seconds = elapsed();
        return res;
    }

    std::vector<GroundAction> steps;
    std::vector<StepJustification> just;
    bool depth_cut = false;
    bool found = false;
    std::optional<FailureReason> interrupted;

    // Instances are attempted one at a time in enumeration order: the search
    // commits to the first object tuple satisfying the static constraints and
    // only moves to the next tuple when the current search fails outright.
    // Chasing the union of all tuples at once drags the candidate tiers
    // toward objects of rival instances and inflates backtracking.
    for (const auto& inst : instances) {
        std::vector<Literal> itargets = targets_of_instances({inst});
        std::set<std::string> visited{state_key(canonicalize(s0))};
        steps.clear();
        just.clear();

        auto met_targets = [&](const StateRecord& s) {
            std::vector<bool> met(itargets.size());
            for (std::size_t i = 0; i < itargets.size(); ++i)
                met[i] = literal_met(itargets[i], s, kb);
            return met;
        };

        std::function<bool(const StateRecord&, int)> dfs =
            [&](const StateRecord& s, int depth) -> bool {
            if (elapsed() > limits.wall_timeout_s)
                throw TimeoutSignal{};
            if (++res.expansions > limits.max_expansions)
                throw BudgetSignal{};

            std::vector<Candidate> cands = enumerate_candidates(s, inst, kb);
            std::vector<StepJustification::Rejected> rejected;
            std::vector<bool> met_before = met_targets(s);

            for (Candidate& c : cands) {
                if (!c.is_legal) {
                    rejected.push_back({c.action, c.tier, c.reject_reason});
                    continue;
                }
                if (depth + 1 > limits.max_depth) {
                    depth_cut = true;
                    continue;
                }
                StateRecord next = update(c.action, s, kb);
                std::string key = state_key(canonicalize(next));
                if (visited.count(key))
                    continue;

                StepJustification sj;
                sj.chosen = c.action;
                sj.tier = c.tier;
                sj.preconditions = c.proofs;
                sj.rejected = rejected;
                std::vector<bool> met_after = met_targets(next);
                for (std::size_t i = 0; i < itargets.size(); ++i)
                    if (!met_before[i] && met_after[i])
                        sj.newly_satisfied.push_back(itargets[i]);

                steps.push_back(c.action);
                just.push_back(std::move(sj));

                if (state_subset(inst, next, kb))
                    return true;

                visited.insert(key);
                if (dfs(next, depth + 1))
                    return true;
                visited.erase(key);
                steps.pop_back();
                just.pop_back();
            }
            return false;
        };

        try {
            if (dfs(s0, 0)) {
                found = true;
                break;
            }
        } catch (const TimeoutSignal&) {
            interrupted = FailureReason::Timeout;
            break;
        } catch (const BudgetSignal&) {
            interrupted = FailureReason::Exhausted;
            break;
        }
    }

    res.seconds = elapsed();
    if (found) {
        res.plan = Plan{std::move(steps), task.name, kb.level};
        res.trace.steps = std::move(just);
        return res;
    }

    PlanFailure f;
    if (interrupted == FailureReason::Timeout) {
        f.reason = FailureReason::Timeout;
        f.detail = "wall timeout exceeded";
    } else if (interrupted == FailureReason::Exhausted) {
        f.reason = FailureReason::Exhausted;
        f.detail = "expansion budget exhausted";
        f.capability_gaps = capability_gaps(kb);
    } else if (depth_cut) {
        f.reason = FailureReason::DepthExceeded;
        f.detail = "no plan within depth " + std::to_string(limits.max_depth);
    } else {
        f.reason = FailureReason::Exhausted;
        f.detail = "search space exhausted";
        f.capability_gaps = capability_gaps(kb);
    }
    res.failure = std::move(f);
    return res;
}

FallbackResult plan_with_fallback(const Program& p, const FactBase& f,
                                  const SceneGraph& scene, const TaskDef& task,
                                  OptLevel level, const PlanLimits& limits) {
    std::vector<OptLevel> ladder{level};
    if (level == OptLevel::Full)
        ladder.push_back(OptLevel::PartialGround);
    if (level != OptLevel::Standard)
        ladder.push_back(OptLevel::Standard);

    FallbackResult out;
    for (OptLevel lvl : ladder) {
        out.kb = optimize(p, f, scene, task, lvl);
        out.result = plan(out.kb, task, limits);
        out.levels_tried.push_back(lvl);
        if (out.result.ok())
            return out;
    }
    return out;
}

std::string render_trace(const Program& p, const JustificationTrace& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const StepJustification& sj = t.steps[i];
        os << "step " << (i + 1) << ": " << render_ground_action(p, sj.chosen)
           << "  [tier " << sj.tier << "]\n";
        if (!sj.newly_satisfied.empty()) {
            os << "  satisfies:";
            for (const Literal& l : sj.newly_satisfied)
                os << ' ' << render_literal(l);
            os << '\n';
        }
        if (!sj.preconditions.empty()) {
            os << "  preconditions:\n";
            for (const Derivation& d : sj.preconditions) {
                std::istringstream lines(render_derivation(d));
                std::string line;
                while (std::getline(lines, line))
                    os << "    " << line << '\n';
            }
        }
        if (!sj.rejected.empty()) {
            os << "  rejected above:\n";
            for (const auto& r : sj.rejected)
                os << "    " << render_ground_action(p, r.action) << "  [tier "
                   << r.tier << "]: " << r.reason << '\n';
        }
    }
    return os.str();
}

} // namespace vecsr
