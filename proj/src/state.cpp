#include "vecsr/state.hpp"

#include <algorithm>
#include <sstream>

namespace vecsr {

const char* relation_name(RelationKind k) {
    switch (k) {
    case RelationKind::Holds: return "holds";
    case RelationKind::Close: return "close";
    case RelationKind::On: return "on";
    case RelationKind::Open: return "open";
    case RelationKind::OnTopOf: return "on_top_of";
    case RelationKind::Inside: return "inside";
    case RelationKind::Sitting: return "sitting";
    case RelationKind::Lying: return "lying";
    case RelationKind::Clean: return "clean";
    case RelationKind::Dirty: return "dirty";
    }
    return "?";
}

std::optional<RelationKind> relation_from_name(std::string_view name) {
    for (RelationKind k : all_relations())
        if (name == relation_name(k))
            return k;
    return std::nullopt;
}

int relation_arity(RelationKind k) {
    switch (k) {
    case RelationKind::OnTopOf:
    case RelationKind::Inside:
        return 2;
    default:
        return 1;
    }
}

bool relation_agent_centric(RelationKind k) {
    switch (k) {
    case RelationKind::Holds:
    case RelationKind::Close:
    case RelationKind::Sitting:
    case RelationKind::Lying:
        return true;
    default:
        return false;
    }
}

bool tuple_less(const Tuple& a, const Tuple& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        object_less);
}

bool StateRecord::contains(RelationKind k, const Tuple& t) const {
    const auto& l = list(k);
    return std::find(l.begin(), l.end(), t) != l.end();
}

bool StateRecord::add(RelationKind k, const Tuple& t) {
    if (contains(k, t))
        return false;
    list(k).push_back(t);
    return true;
}

bool StateRecord::remove(RelationKind k, const Tuple& t) {
    auto& l = list(k);
    auto it = std::find(l.begin(), l.end(), t);
    if (it == l.end())
        return false;
    l.erase(it);
    return true;
}

std::size_t StateRecord::tuple_count() const {
    std::size_t n = 0;
    for (const auto& l : relations)
        n += l.size();
    return n;
}

StateRecord canonicalize(const StateRecord& s) {
    StateRecord out = s;
    for (auto& l : out.relations)
        std::sort(l.begin(), l.end(), tuple_less);
    return out;
}

std::string state_key(const StateRecord& s) {
    StateRecord c = canonicalize(s);
    std::ostringstream os;
    for (RelationKind k : all_relations()) {
        const auto& l = c.list(k);
        if (l.empty())
            continue;
        os << relation_name(k) << '[';
        for (const Tuple& t : l) {
            for (const ObjectId& o : t)
                os << render_object(o) << ',';
            os << ';';
        }
        os << ']';
    }
    return os.str();
}

bool FactBase::has_type(const ObjectId& obj, Symbol cls) const {
    static const Symbol type_sym = intern("type");
    for (const StaticFact& f : statics)
        if (!f.negated && f.predicate == type_sym && f.subject == obj &&
            f.class_arg == cls)
            return true;
    return false;
}

bool FactBase::has_tag(Symbol predicate, const ObjectId& obj) const {
    for (const StaticFact& f : statics)
        if (!f.negated && f.predicate == predicate && f.subject == obj &&
            f.class_arg == kNoSymbol)
            return true;
    return false;
}

bool FactBase::has_negated_tag(Symbol predicate, const ObjectId& obj) const {
    for (const StaticFact& f : statics)
        if (f.negated && f.predicate == predicate && f.subject == obj)
            return true;
    return false;
}

std::string render_fact(const StaticFact& f) {
    std::string out;
    if (f.negated)
        out += '-';
    out += symbol_name(f.predicate);
    out += '(';
    out += render_object(f.subject);
    if (f.class_arg != kNoSymbol) {
        out += ", ";
        out += symbol_name(f.class_arg);
    }
    out += ").";
    return out;
}

} // namespace vecsr
