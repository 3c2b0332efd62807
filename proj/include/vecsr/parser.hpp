#pragma once

#include "vecsr/ast.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace vecsr {

struct SyntaxError : std::runtime_error {
    int line = 0;
    int col = 0;
    std::string expected;
    SyntaxError(int line_, int col_, const std::string& expected_,
                const std::string& msg)
        : std::runtime_error(msg), line(line_), col(col_), expected(expected_) {}
};

struct UnsafeRule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownRelation : std::runtime_error {
    std::string relation;
    explicit UnknownRelation(const std::string& rel)
        : std::runtime_error("unknown dynamic relation: " + rel), relation(rel) {}
};

// Parses program text. Include directives are only honored when parsing from
// a file (they resolve relative to the including file).
Program parse_program(const std::string& text, const std::string& source_name = "<text>");
Program parse_program_file(const std::string& path);

// Parses a query: a comma-separated literal conjunction, optionally
// "."-terminated.
std::vector<Literal> parse_query(const std::string& text);

// Canonical source form; parse_program(print_program(p)) == p.
std::string print_program(const Program& p);

std::string print_rule(const Rule& r);
std::string print_action(const ActionSchema& a);
std::string print_task(const TaskDef& t);

} // namespace vecsr
