#pragma once

#include "vecsr/ast.hpp"

#include <random>
#include <vector>

namespace vecsr::testsupport {

// A randomly generated stratified logic case: non-recursive rules over a
// layered predicate pool, ground facts split between program clauses and the
// fact base, plus a small dynamic state. Naf literals always follow the
// positive literals that bind their variables, so they are ground at call
// time under left-to-right evaluation.
struct LogicCase {
    Program program;
    FactBase facts;
    StateRecord state;
    std::vector<Term> constants; // query enumeration universe

    struct Pred {
        Symbol name;
        int arity;
        int level;
    };
    std::vector<Pred> preds;
};

LogicCase random_logic_case(std::mt19937& rng);

} // namespace vecsr::testsupport
