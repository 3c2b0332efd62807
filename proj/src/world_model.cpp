#include "vecsr/world_model.hpp"

#include <algorithm>
#include <sstream>

namespace vecsr {
namespace {

struct TagMap {
    Symbol on = intern("ON");
    Symbol off = intern("OFF");
    Symbol open = intern("OPEN");
    Symbol closed = intern("CLOSED");
    Symbol clean = intern("CLEAN");
    Symbol dirty = intern("DIRTY");
};

const TagMap& tags() {
    static TagMap t;
    return t;
}

} // namespace

FactBase to_facts(const SceneGraph& scene) {
    FactBase fb;
    const Symbol type_sym = intern("type");

    std::vector<const SceneNode*> ordered;
    ordered.reserve(scene.nodes.size());
    for (const SceneNode& n : scene.nodes)
        ordered.push_back(&n);
    std::sort(ordered.begin(), ordered.end(),
              [](const SceneNode* a, const SceneNode* b) {
                  return object_less(a->id, b->id);
              });

    for (const SceneNode* n : ordered) {
        fb.statics.push_back(StaticFact{type_sym, false, n->id, n->class_name});
        fb.classes.push_back(FactClass::Type);
        std::vector<Symbol> props = n->properties;
        std::sort(props.begin(), props.end(), [](Symbol a, Symbol b) {
            return symbol_name(a) < symbol_name(b);
        });
        for (Symbol p : props) {
            fb.statics.push_back(StaticFact{p, false, n->id, kNoSymbol});
            fb.classes.push_back(FactClass::Attribute);
        }
        if (n->category != kNoSymbol) {
            fb.statics.push_back(StaticFact{n->category, false, n->id, kNoSymbol});
            fb.classes.push_back(FactClass::Category);
        }
    }

    // State tags.
    for (const SceneNode* n : ordered) {
        for (Symbol s : n->states) {
            if (s == tags().on)
                fb.state.add(RelationKind::On, {n->id});
            else if (s == tags().open)
                fb.state.add(RelationKind::Open, {n->id});
            else if (s == tags().clean)
                fb.state.add(RelationKind::Clean, {n->id});
            else if (s == tags().dirty)
                fb.state.add(RelationKind::Dirty, {n->id});
            // OFF and CLOSED are the absence of on/open.
        }
    }

    // Dynamic edges. Close and holds edges are agent-centric: only edges from
    // the agent contribute, and the stored tuple drops the agent.
    for (const SceneEdge& e : scene.edges) {
        switch (e.relation) {
        case EdgeRelation::OnTopOf:
            fb.state.add(RelationKind::OnTopOf, {e.from, e.to});
            break;
        case EdgeRelation::Inside:
            fb.state.add(RelationKind::Inside, {e.from, e.to});
            break;
        case EdgeRelation::Close:
            if (e.from == scene.agent)
                fb.state.add(RelationKind::Close, {e.to});
            else if (e.to == scene.agent)
                fb.state.add(RelationKind::Close, {e.from});
            break;
        case EdgeRelation::Holds:
            if (e.from == scene.agent)
                fb.state.add(RelationKind::Holds, {e.to});
            break;
        case EdgeRelation::Facing:
            break; // not a dynamic relation
        }
    }
    return fb;
}

StateRecord initial_state(const FactBase& facts, const SceneGraph& scene) {
    if (scene.agent.name == kNoSymbol)
        throw UnknownAgent("scene names no agent node");
    bool located = false;
    for (const Tuple& t : facts.state.list(RelationKind::Inside))
        if (t.size() == 2 && t[0] == scene.agent)
            located = true;
    if (!located)
        throw UnknownAgent("agent has no inside edge giving its location");
    if (facts.state.list(RelationKind::Holds).size() > 2)
        throw UnknownAgent("agent holds more than two objects in the scene");
    return facts.state;
}

std::string render_state_line(RelationKind k, const std::vector<Tuple>& tuples) {
    std::ostringstream os;
    os << relation_name(k) << "([";
    bool first = true;
    for (const Tuple& t : tuples) {
        if (!first)
            os << ", ";
        first = false;
        if (t.size() == 1) {
            os << render_object(t[0]);
        } else {
            os << '[';
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i)
                    os << ", ";
                os << render_object(t[i]);
            }
            os << ']';
        }
    }
    os << "]).";
    return os.str();
}

std::string render_fact_base(const FactBase& facts) {
    std::ostringstream os;
    for (const StaticFact& f : facts.statics)
        os << render_fact(f) << '\n';
    for (RelationKind k : all_relations()) {
        const auto& l = facts.state.list(k);
        if (!l.empty())
            os << render_state_line(k, l) << '\n';
    }
    return os.str();
}

} // namespace vecsr
