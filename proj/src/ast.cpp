#include "vecsr/ast.hpp"

#include <cctype>

namespace vecsr {

Symbol neq_symbol() {
    static const Symbol s = intern("!=");
    return s;
}

std::string render_term(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Var: return symbol_name(t.sym);
    case Term::Kind::Object: return render_object(t.obj);
    case Term::Kind::Sym: return symbol_name(t.sym);
    case Term::Kind::Wildcard: return "_";
    }
    return "?";
}

std::string render_literal(const Literal& l) {
    if (l.predicate == neq_symbol())
        return render_term(l.args[0]) + " != " + render_term(l.args[1]);
    std::string out;
    if (l.naf)
        out += "not ";
    if (l.negated)
        out += '-';
    out += symbol_name(l.predicate);
    if (!l.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < l.args.size(); ++i) {
            if (i)
                out += ", ";
            out += render_term(l.args[i]);
        }
        out += ')';
    }
    return out;
}

const ActionSchema* Program::find_action(Symbol name) const {
    for (const ActionSchema& a : actions)
        if (a.name == name)
            return &a;
    return nullptr;
}

const TaskDef* Program::find_task(Symbol name) const {
    for (const TaskDef& t : tasks)
        if (t.name == name)
            return &t;
    return nullptr;
}

std::string default_tag(Symbol action_name) {
    const std::string& raw = symbol_name(action_name);
    std::string out;
    bool up = true;
    for (char c : raw) {
        if (c == '_') {
            up = true;
            continue;
        }
        out.push_back(up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                         : c);
        up = false;
    }
    return out;
}

} // namespace vecsr
