#pragma once

#include "vecsr/ast.hpp"

#include <random>

namespace vecsr::testsupport {

// Builds a random grammar-conformant Program in parser-normalized form:
// dynamic literals carry their RelationKind, agent-centric relations are
// stored at their reduced arity, and every rule/action/task is safe.
Program random_program(std::mt19937& rng);

} // namespace vecsr::testsupport
