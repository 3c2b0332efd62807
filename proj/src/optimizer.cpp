#include "vecsr/optimizer.hpp"

#include "vecsr/parser.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

namespace vecsr {

namespace {

Symbol door_class() {
    static const Symbol s = intern("door");
    return s;
}

Symbol doorjamb_class() {
    static const Symbol s = intern("doorjamb");
    return s;
}

using ObjectSet = std::unordered_set<ObjectId, ObjectHash>;

bool is_static_literal(const Literal& l) {
    return !l.relation && l.predicate != neq_symbol();
}

bool mentions_var(const Literal& l, Symbol var) {
    for (const Term& t : l.args)
        if (t.kind == Term::Kind::Var && t.sym == var)
            return true;
    return false;
}

std::vector<Symbol> goal_variables(const std::vector<Literal>& goal) {
    std::vector<Symbol> vars;
    for (const Literal& l : goal)
        for (const Term& t : l.args)
            if (t.kind == Term::Kind::Var &&
                std::find(vars.begin(), vars.end(), t.sym) == vars.end())
                vars.push_back(t.sym);
    return vars;
}

std::vector<ObjectId> goal_constants(const std::vector<Literal>& goal) {
    std::vector<ObjectId> out;
    for (const Literal& l : goal)
        for (const Term& t : l.args)
            if (t.kind == Term::Kind::Object &&
                std::find(out.begin(), out.end(), t.obj) == out.end())
                out.push_back(t.obj);
    return out;
}

Term subst(const Term& t, const Binding& b) {
    if (t.kind == Term::Kind::Var) {
        auto it = b.find(t.sym);
        if (it != b.end())
            return it->second;
    }
    return t;
}

Literal subst(const Literal& l, const Binding& b) {
    Literal out = l;
    for (Term& t : out.args)
        t = subst(t, b);
    return out;
}

std::string render_state_tuple(RelationKind k, const Tuple& t) {
    std::string out = relation_name(k);
    out += '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ", ";
        out += render_object(t[i]);
    }
    out += ')';
    return out;
}

// Keeps only facts and state tuples whose objects are all retained.
FactBase filter_facts(const FactBase& f, const ObjectSet& keep,
                      const char* stage, Provenance* prov) {
    FactBase out;
    for (std::size_t i = 0; i < f.statics.size(); ++i) {
        if (keep.count(f.statics[i].subject)) {
            out.statics.push_back(f.statics[i]);
            out.classes.push_back(f.classes[i]);
        } else if (prov) {
            prov->dropped.push_back(
                {stage, "fact", render_fact(f.statics[i])});
        }
    }
    for (RelationKind k : all_relations()) {
        for (const Tuple& t : f.state.list(k)) {
            bool all = true;
            for (const ObjectId& o : t)
                if (!keep.count(o)) {
                    all = false;
                    break;
                }
            if (all)
                out.state.add(k, t);
            else if (prov)
                prov->dropped.push_back(
                    {stage, "state", render_state_tuple(k, t)});
        }
    }
    return out;
}

// Objects in f satisfying every literal, matching statics directly. Only
// single-variable literals participate; the variable is the candidate slot.
std::vector<ObjectId> match_candidates(const FactBase& f, Symbol var,
                                       const std::vector<Literal>& constraints) {
    std::vector<ObjectId> candidates;
    bool first = true;
    for (const Literal& l : constraints) {
        std::vector<ObjectId> here;
        for (const StaticFact& fact : f.statics) {
            if (fact.predicate != l.predicate || fact.negated != l.negated)
                continue;
            bool ok = true;
            for (std::size_t i = 0; i < l.args.size(); ++i) {
                const Term& a = l.args[i];
                if (a.kind == Term::Kind::Var && a.sym == var)
                    continue; // candidate slot
                if (i == 0) {
                    if (!(a.kind == Term::Kind::Object && a.obj == fact.subject))
                        ok = false;
                } else {
                    if (!(a.kind == Term::Kind::Sym && a.sym == fact.class_arg))
                        ok = false;
                }
                if (!ok)
                    break;
            }
            if (ok)
                here.push_back(fact.subject);
        }
        if (first) {
            candidates = std::move(here);
            first = false;
        } else {
            std::vector<ObjectId> merged;
            for (const ObjectId& o : candidates)
                if (std::find(here.begin(), here.end(), o) != here.end())
                    merged.push_back(o);
            candidates = std::move(merged);
        }
    }
    return candidates;
}

DepNode node_of(const Literal& l) {
    return DepNode{l.predicate, l.negated, static_cast<int>(l.args.size())};
}

// Objects bound to the agent's own condition: whatever it holds and whatever
// it sits or lies on. Dropping these would desynchronize replay on the full
// world (posture and hand constraints would differ), so every pruning stage
// keeps them.
void add_sticky_members(const FactBase& f, ObjectSet& keep) {
    for (RelationKind k :
         {RelationKind::Holds, RelationKind::Sitting, RelationKind::Lying})
        for (const Tuple& t : f.state.list(k))
            for (const ObjectId& o : t)
                keep.insert(o);
}

} // namespace

const char* opt_level_name(OptLevel level) {
    switch (level) {
    case OptLevel::Standard: return "standard";
    case OptLevel::Modular: return "modular";
    case OptLevel::DepGraph: return "depgraph";
    case OptLevel::PartialGround: return "ground";
    case OptLevel::Full: return "full";
    }
    return "?";
}

std::optional<OptLevel> opt_level_from_name(std::string_view name) {
    if (name == "standard")
        return OptLevel::Standard;
    if (name == "modular")
        return OptLevel::Modular;
    if (name == "depgraph")
        return OptLevel::DepGraph;
    if (name == "ground")
        return OptLevel::PartialGround;
    if (name == "full")
        return OptLevel::Full;
    return std::nullopt;
}

std::string render_provenance(const Provenance& p) {
    std::ostringstream os;
    for (const Provenance::Item& it : p.dropped)
        os << it.stage << '\t' << it.kind << '\t' << it.item << '\n';
    return os.str();
}

FactBase modular_prune(const FactBase& f, const SceneGraph& scene,
                       const TaskDef& task, Provenance* prov) {
    ObjectId selected{};
    bool have_room = false;

    if (task.room_hint != kNoSymbol) {
        for (const ObjectId& rid : scene.room_ids) {
            const SceneNode* n = scene.find(rid);
            if (n && n->class_name == task.room_hint) {
                selected = rid;
                have_room = true;
                break;
            }
        }
        if (!have_room)
            throw NoModuleResolvable("no room of class '" +
                                     symbol_name(task.room_hint) +
                                     "' in the scene");
    } else {
        // Vote: the room holding the most objects that satisfy the goal's
        // static constraints; ties go to the smaller room id.
        std::vector<ObjectId> voters = goal_constants(task.goal);
        for (Symbol var : goal_variables(task.goal)) {
            std::vector<Literal> constraints;
            for (const Literal& l : task.goal)
                if (is_static_literal(l) && !l.naf && mentions_var(l, var))
                    constraints.push_back(l);
            if (constraints.empty())
                continue;
            for (const ObjectId& o : match_candidates(f, var, constraints))
                if (std::find(voters.begin(), voters.end(), o) == voters.end())
                    voters.push_back(o);
        }
        std::map<ObjectId, int, bool (*)(const ObjectId&, const ObjectId&)>
            votes(object_less);
        for (const ObjectId& o : voters) {
            if (is_agent(o) || scene.is_room(o))
                continue;
            votes[scene.room_of(o)] += 1;
        }
        for (const auto& [room, count] : votes)
            if (!have_room || count > votes[selected]) {
                selected = room;
                have_room = true;
            }
        if (!have_room)
            throw NoModuleResolvable(
                "goal constraints select no objects; cannot infer a room");
    }

    ObjectSet keep;
    keep.insert(ObjectId{agent_symbol(), 1});
    for (const ObjectId& rid : scene.room_ids)
        keep.insert(rid);
    for (const SceneNode& n : scene.nodes) {
        if (n.class_name == door_class() || n.class_name == doorjamb_class())
            keep.insert(n.id);
        else if (!scene.is_room(n.id) && !is_agent(n.id) &&
                 scene.room_of(n.id) == selected)
            keep.insert(n.id);
    }
    add_sticky_members(f, keep);
    return filter_facts(f, keep, "modular", prov);
}

DepGraph build_dependency_graph(const Program& p,
                                const std::vector<Literal>& query) {
    DepGraph g;
    for (const Literal& l : query) {
        if (l.predicate == neq_symbol())
            continue;
        DepNode n = node_of(l);
        if (!g.nodes.count(n)) {
            g.nodes.insert(n);
            g.roots.push_back(n);
        }
    }

    std::map<DepNode, std::vector<std::size_t>> by_head;
    for (std::size_t i = 0; i < p.clauses.size(); ++i)
        if (!p.clauses[i].is_constraint)
            by_head[node_of(p.clauses[i].head)].push_back(i);

    std::set<std::pair<DepNode, DepNode>> seen;
    std::deque<DepNode> work(g.roots.begin(), g.roots.end());
    while (!work.empty()) {
        DepNode n = work.front();
        work.pop_front();
        auto it = by_head.find(n);
        if (it == by_head.end())
            continue;
        for (std::size_t ci : it->second) {
            for (const Literal& b : p.clauses[ci].body) {
                if (b.predicate == neq_symbol())
                    continue;
                DepNode callee = node_of(b);
                if (seen.insert({n, callee}).second)
                    g.edges.push_back({n, callee});
                if (!g.nodes.count(callee)) {
                    g.nodes.insert(callee);
                    work.push_back(callee);
                }
            }
        }
    }
    return g;
}

Program depgraph_prune(const Program& p, const DepGraph& g, Provenance* prov) {
    Program out;
    out.actions = p.actions;
    out.tasks = p.tasks;
    for (const Rule& c : p.clauses) {
        if (c.is_constraint || g.reachable(node_of(c.head))) {
            out.clauses.push_back(c);
        } else if (prov) {
            std::string text = print_rule(c);
            if (!text.empty() && text.back() == '\n')
                text.pop_back();
            prov->dropped.push_back({"depgraph", "rule", text});
        }
    }
    return out;
}

CompiledKB partial_ground(const Program& p, const FactBase& f,
                          const TaskDef& task, Provenance* prov) {
    CompiledKB kb;
    kb.level = OptLevel::PartialGround;
    kb.program = p;

    for (Symbol var : goal_variables(task.goal)) {
        std::vector<Literal> constraints;
        for (const Literal& l : task.goal)
            if (is_static_literal(l) && !l.naf && mentions_var(l, var))
                constraints.push_back(subst(l, kb.bindings));
        if (constraints.empty())
            continue;
        std::vector<ObjectId> candidates;
        for (const Answer& a : solve(p, f, f.state, constraints)) {
            auto it = a.binding.find(var);
            if (it == a.binding.end() || it->second.kind != Term::Kind::Object)
                continue;
            if (std::find(candidates.begin(), candidates.end(),
                          it->second.obj) == candidates.end())
                candidates.push_back(it->second.obj);
        }
        if (candidates.empty())
            throw NoCandidate(var, "no candidate object for goal variable " +
                                       symbol_name(var));
        std::sort(candidates.begin(), candidates.end(), object_less);
        kb.bindings[var] = Term::object(candidates.front());
    }

    for (const Literal& l : task.goal)
        kb.goal.push_back(subst(l, kb.bindings));

    ObjectSet core;
    core.insert(ObjectId{agent_symbol(), 1});
    for (const auto& [var, t] : kb.bindings)
        core.insert(t.obj);
    for (const ObjectId& o : goal_constants(kb.goal))
        core.insert(o);
    ObjectSet rooms;
    for (std::size_t i = 0; i < f.statics.size(); ++i)
        if (f.classes[i] == FactClass::Category &&
            f.statics[i].predicate == rooms_category())
            rooms.insert(f.statics[i].subject);
    core.insert(rooms.begin(), rooms.end());

    // One dynamic-relation hop around the core. Rooms do not seed the hop:
    // every object sits inside some room, so hopping from rooms would retain
    // the whole scene.
    ObjectSet keep = core;
    for (RelationKind k : all_relations())
        for (const Tuple& t : f.state.list(k)) {
            bool touches = false;
            for (const ObjectId& o : t)
                if (core.count(o) && !rooms.count(o)) {
                    touches = true;
                    break;
                }
            if (touches)
                for (const ObjectId& o : t)
                    keep.insert(o);
        }
    add_sticky_members(f, keep);

    Provenance local;
    kb.facts = filter_facts(f, keep, "ground", &local);
    if (prov)
        prov->dropped.insert(prov->dropped.end(), local.dropped.begin(),
                             local.dropped.end());
    kb.provenance = std::move(local);
    return kb;
}

CompiledKB optimize(const Program& p, const FactBase& f,
                    const SceneGraph& scene, const TaskDef& task,
                    OptLevel level) {
    CompiledKB kb;
    kb.level = level;
    kb.program = p;
    kb.facts = f;
    kb.goal = task.goal;

    const bool modular =
        level == OptLevel::Modular || level == OptLevel::Full;
    const bool depgraph =
        level == OptLevel::DepGraph || level == OptLevel::Full;
    const bool ground =
        level == OptLevel::PartialGround || level == OptLevel::Full;

    if (modular) {
        try {
            kb.facts = modular_prune(kb.facts, scene, task, &kb.provenance);
        } catch (const NoModuleResolvable& e) {
            kb.warnings.push_back(std::string("modular stage skipped: ") +
                                  e.what());
        }
    }

    if (depgraph) {
        // Roots cover everything the planner can query: the task goal, every
        // action precondition, and every constraint body.
        std::vector<Literal> roots = task.goal;
        for (const ActionSchema& a : kb.program.actions)
            roots.insert(roots.end(), a.pre.begin(), a.pre.end());
        for (const Rule& c : kb.program.clauses)
            if (c.is_constraint)
                roots.insert(roots.end(), c.body.begin(), c.body.end());
        DepGraph g = build_dependency_graph(kb.program, roots);
        kb.program = depgraph_prune(kb.program, g, &kb.provenance);
    }

    if (ground) {
        try {
            CompiledKB stage =
                partial_ground(kb.program, kb.facts, task, &kb.provenance);
            kb.facts = std::move(stage.facts);
            kb.goal = std::move(stage.goal);
            kb.bindings = std::move(stage.bindings);
        } catch (const NoCandidate& e) {
            kb.warnings.push_back(std::string("ground stage skipped: ") +
                                  e.what());
        }
    }

    return kb;
}

} // namespace vecsr
