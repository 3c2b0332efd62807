#include "world_oracle.hpp"

#include "vecsr/scene.hpp"
#include "vecsr/solver.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace vecsr::testsupport {

namespace {

using ParamMap = std::map<Symbol, ObjectId>;

std::set<ObjectId, bool (*)(const ObjectId&, const ObjectId&)>
room_set(const FactBase& f) {
    std::set<ObjectId, bool (*)(const ObjectId&, const ObjectId&)> rooms(
        object_less);
    for (std::size_t i = 0; i < f.statics.size(); ++i)
        if (f.classes[i] == FactClass::Category &&
            f.statics[i].predicate == rooms_category())
            rooms.insert(f.statics[i].subject);
    return rooms;
}

ParamMap param_map(const ActionSchema& sc, const GroundAction& a) {
    if (sc.params.size() != a.args.size())
        throw std::runtime_error("oracle: arity mismatch");
    ParamMap m;
    for (std::size_t i = 0; i < sc.params.size(); ++i)
        m[sc.params[i]] = a.args[i];
    return m;
}

std::vector<Literal> bound_pres(const ActionSchema& sc, const ParamMap& m) {
    std::vector<Literal> out;
    for (const Literal& l : sc.pre) {
        Literal b = l;
        for (Term& t : b.args)
            if (t.kind == Term::Kind::Var && m.count(t.sym))
                t = Term::object(m.at(t.sym));
        out.push_back(b);
    }
    return out;
}

// Recursive proximity closure, deliberately structured differently from the
// engine's worklist version.
void close_around(StateRecord& s, const ObjectId& x,
                  const std::set<ObjectId, bool (*)(const ObjectId&,
                                                    const ObjectId&)>& rooms,
                  std::set<std::string>& visited) {
    if (!visited.insert(render_object(x)).second)
        return;
    s.add(RelationKind::Close, {x});
    if (rooms.count(x) || is_agent(x))
        return;
    auto follow = [&](const ObjectId& n) {
        if (!rooms.count(n) && !is_agent(n))
            close_around(s, n, rooms, visited);
    };
    for (const Tuple& t : s.list(RelationKind::OnTopOf)) {
        if (t[0] == x)
            follow(t[1]);
        if (t[1] == x)
            follow(t[0]);
    }
    for (const Tuple& t : s.list(RelationKind::Inside)) {
        if (t[0] == x)
            follow(t[1]);
        if (t[1] == x)
            follow(t[0]);
    }
}

} // namespace

std::vector<ObjectId> world_objects(const FactBase& f) {
    std::vector<ObjectId> out;
    for (const StaticFact& sf : f.statics)
        if (!is_agent(sf.subject) &&
            std::find(out.begin(), out.end(), sf.subject) == out.end())
            out.push_back(sf.subject);
    std::sort(out.begin(), out.end(), object_less);
    return out;
}

bool oracle_legal(const Program& p, const FactBase& f, const StateRecord& s,
                  const GroundAction& a) {
    const ActionSchema* sc = p.find_action(a.schema);
    if (!sc || sc->params.size() != a.args.size())
        return false;
    if (!provable(p, f, s, bound_pres(*sc, param_map(*sc, a))))
        return false;
    StateRecord next = oracle_apply(p, f, s, a);
    for (const Rule& c : p.clauses)
        if (c.is_constraint && provable(p, f, next, c.body))
            return false;
    return true;
}

StateRecord oracle_apply(const Program& p, const FactBase& f,
                         const StateRecord& s, const GroundAction& a) {
    const ActionSchema* sc = p.find_action(a.schema);
    if (!sc)
        throw std::runtime_error("oracle: unknown schema");
    ParamMap m = param_map(*sc, a);
    auto rooms = room_set(f);

    StateRecord next = s;
    for (const Effect& e : sc->del) {
        std::vector<Tuple> survivors;
        for (const Tuple& t : next.list(e.relation)) {
            bool hit = t.size() == e.args.size();
            for (std::size_t i = 0; hit && i < t.size(); ++i) {
                const Term& pat = e.args[i];
                if (pat.kind == Term::Kind::Wildcard)
                    continue;
                ObjectId want = pat.kind == Term::Kind::Object
                                    ? pat.obj
                                    : m.at(pat.sym);
                hit = want == t[i];
            }
            if (!hit)
                survivors.push_back(t);
        }
        next.list(e.relation) = survivors;
    }
    for (const Effect& e : sc->add) {
        Tuple t;
        for (const Term& arg : e.args)
            t.push_back(arg.kind == Term::Kind::Object ? arg.obj
                                                       : m.at(arg.sym));
        if (e.relation == RelationKind::Close && t.size() == 1 &&
            !rooms.count(t[0])) {
            std::set<std::string> visited;
            close_around(next, t[0], rooms, visited);
        } else {
            next.add(e.relation, t);
        }
    }
    return next;
}

std::vector<GroundAction> oracle_actions(const Program& p, const FactBase& f,
                                         const StateRecord& s) {
    std::vector<ObjectId> objs = world_objects(f);
    std::vector<GroundAction> out;
    for (const ActionSchema& sc : p.actions) {
        std::size_t n = sc.params.size();
        if (n == 0) {
            GroundAction a{sc.name, {}};
            if (oracle_legal(p, f, s, a))
                out.push_back(a);
            continue;
        }
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            GroundAction a{sc.name, {}};
            for (std::size_t i = 0; i < n; ++i)
                a.args.push_back(objs[idx[i]]);
            if (oracle_legal(p, f, s, a))
                out.push_back(a);
            std::size_t k = n;
            while (k > 0) {
                if (++idx[k - 1] < objs.size())
                    break;
                idx[k - 1] = 0;
                --k;
            }
            if (k == 0)
                break;
        }
    }
    return out;
}

BfsResult bfs_solvable(const Program& p, const FactBase& f,
                       const StateRecord& s0, const std::vector<Literal>& goal,
                       std::size_t state_cap) {
    BfsResult res;
    auto satisfied = [&](const StateRecord& s) {
        return goal.empty() || provable(p, f, s, goal);
    };

    std::set<std::string> seen{state_key(canonicalize(s0))};
    std::deque<std::pair<StateRecord, int>> queue{{s0, 0}};
    res.exhausted = true;
    while (!queue.empty()) {
        auto [s, d] = queue.front();
        queue.pop_front();
        ++res.states;
        if (satisfied(s)) {
            res.solvable = true;
            res.depth = d;
            return res;
        }
        if (res.states + queue.size() > state_cap) {
            res.exhausted = false;
            continue; // stop expanding, drain the queue for goal checks
        }
        for (const GroundAction& a : oracle_actions(p, f, s)) {
            StateRecord next = oracle_apply(p, f, s, a);
            std::string key = state_key(canonicalize(next));
            if (seen.insert(key).second)
                queue.emplace_back(std::move(next), d + 1);
        }
    }
    return res;
}

} // namespace vecsr::testsupport
