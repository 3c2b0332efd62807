#include "vecsr/parser.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vecsr {
namespace {

enum class Tok : std::uint8_t {
    Ident,   // lowercase-initial identifier
    Var,     // uppercase-initial identifier
    Wild,    // _
    Str,     // "..."
    LParen, RParen, LBrace, RBrace,
    Comma, Dot, Semi, Colon,
    Implies, // :-
    Neq,     // !=
    Minus,   // -
    Hash,    // #
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    Lexer(const std::string& text, std::string source)
        : text_(text), source_(std::move(source)) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = text_[pos_];
        if (c == '(') return punct(t, Tok::LParen);
        if (c == ')') return punct(t, Tok::RParen);
        if (c == '{') return punct(t, Tok::LBrace);
        if (c == '}') return punct(t, Tok::RBrace);
        if (c == ',') return punct(t, Tok::Comma);
        if (c == '.') return punct(t, Tok::Dot);
        if (c == ';') return punct(t, Tok::Semi);
        if (c == '#') return punct(t, Tok::Hash);
        if (c == ':') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                advance();
                advance();
                t.kind = Tok::Implies;
                return t;
            }
            return punct(t, Tok::Colon);
        }
        if (c == '!') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                advance();
                advance();
                t.kind = Tok::Neq;
                return t;
            }
            throw SyntaxError(line_, col_, "'='", err_prefix() + "stray '!'");
        }
        if (c == '-') return punct(t, Tok::Minus);
        if (c == '"') {
            advance();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\n')
                    throw SyntaxError(t.line, t.col, "closing '\"'",
                                      err_prefix() + "unterminated string");
                s.push_back(text_[pos_]);
                advance();
            }
            if (pos_ >= text_.size())
                throw SyntaxError(t.line, t.col, "closing '\"'",
                                  err_prefix() + "unterminated string");
            advance();
            t.kind = Tok::Str;
            t.text = s;
            return t;
        }
        if (c == '_' && !ident_char(peek_at(pos_ + 1))) {
            advance();
            t.kind = Tok::Wild;
            t.text = "_";
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < text_.size() && ident_char(text_[pos_])) {
                s.push_back(text_[pos_]);
                advance();
            }
            t.kind = std::isupper(static_cast<unsigned char>(s[0])) ? Tok::Var
                                                                    : Tok::Ident;
            t.text = s;
            return t;
        }
        throw SyntaxError(line_, col_, "identifier or punctuation",
                          err_prefix() + "unexpected character '" + std::string(1, c) +
                              "'");
    }

    const std::string& source() const { return source_; }

private:
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    char peek_at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    Token punct(Token& t, Tok k) {
        advance();
        t.kind = k;
        return t;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string err_prefix() const { return source_ + ": "; }

    const std::string& text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(const std::string& text, std::string source,
           std::filesystem::path base_dir, std::set<std::string>* include_stack)
        : lex_(text, std::move(source)), base_dir_(std::move(base_dir)),
          include_stack_(include_stack) {
        cur_ = lex_.next();
    }

    Program parse() {
        Program p;
        while (cur_.kind != Tok::End)
            parse_item(p);
        check_program(p);
        return p;
    }

    std::vector<Literal> parse_query_body() {
        std::vector<Literal> lits = parse_body();
        if (cur_.kind == Tok::Dot)
            eat();
        expect(Tok::End, "end of query");
        return lits;
    }

private:
    void parse_item(Program& p) {
        if (cur_.kind == Tok::Hash) {
            parse_include(p);
            return;
        }
        if (cur_.kind == Tok::Ident && cur_.text == "action" && peek_is_block()) {
            p.actions.push_back(parse_action(p));
            return;
        }
        if (cur_.kind == Tok::Ident && cur_.text == "task" && peek_is_block()) {
            p.tasks.push_back(parse_task());
            return;
        }
        parse_clause(p);
    }

    // Distinguishes "action foo(...) {" blocks from a plain literal named
    // action/task by peeking for an identifier after the keyword.
    bool peek_is_block() {
        Lexer probe = lex_;
        Token t = probe.next();
        return t.kind == Tok::Ident;
    }

    void parse_include(Program& p) {
        Token hash = cur_;
        eat();
        if (cur_.kind != Tok::Ident || cur_.text != "include")
            throw SyntaxError(cur_.line, cur_.col, "include",
                              "expected 'include' after '#'");
        eat();
        Token path_tok = expect(Tok::Str, "quoted include path");
        if (include_stack_ == nullptr)
            throw SyntaxError(hash.line, hash.col, "no include",
                              "includes are only allowed when parsing from a file");
        std::filesystem::path inc = base_dir_ / path_tok.text;
        std::string canonical = std::filesystem::weakly_canonical(inc).string();
        if (include_stack_->count(canonical))
            throw SyntaxError(hash.line, hash.col, "acyclic includes",
                              "include cycle through " + canonical);
        std::ifstream in(inc);
        if (!in)
            throw SyntaxError(hash.line, hash.col, "readable file",
                              "cannot open include file: " + inc.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        include_stack_->insert(canonical);
        Parser sub(text, inc.string(), inc.parent_path(), include_stack_);
        Program included = sub.parse();
        include_stack_->erase(canonical);
        for (Rule& r : included.clauses)
            p.clauses.push_back(std::move(r));
        for (ActionSchema& a : included.actions)
            p.actions.push_back(std::move(a));
        for (TaskDef& t : included.tasks)
            p.tasks.push_back(std::move(t));
    }

    void parse_clause(Program& p) {
        Rule r;
        if (cur_.kind == Tok::Implies) {
            eat();
            r.is_constraint = true;
            r.body = parse_body();
            if (r.body.empty())
                throw SyntaxError(cur_.line, cur_.col, "non-empty constraint body",
                                  "constraint body must not be empty");
        } else {
            Token head_tok = cur_;
            r.head = parse_literal(false);
            if (r.head.naf)
                throw SyntaxError(head_tok.line, head_tok.col, "positive head",
                                  "rule head cannot use not");
            if (r.head.relation)
                throw SyntaxError(head_tok.line, head_tok.col,
                                  "non-dynamic head predicate",
                                  "dynamic relation cannot be a rule head: " +
                                      symbol_name(r.head.predicate));
            if (cur_.kind == Tok::Implies) {
                eat();
                r.body = parse_body();
            }
        }
        expect(Tok::Dot, "'.'");
        check_rule_safety(r);
        p.clauses.push_back(std::move(r));
    }

    std::vector<Literal> parse_body() {
        std::vector<Literal> body;
        body.push_back(parse_body_literal());
        while (cur_.kind == Tok::Comma) {
            eat();
            body.push_back(parse_body_literal());
        }
        return body;
    }

    Literal parse_body_literal() {
        // term != term
        if (cur_.kind == Tok::Var || cur_.kind == Tok::Ident) {
            Lexer probe = lex_;
            Token after = probe.next();
            if (after.kind == Tok::Neq) {
                Literal l;
                l.predicate = neq_symbol();
                l.args.push_back(parse_term(false));
                eat(); // !=
                l.args.push_back(parse_term(false));
                return l;
            }
        }
        if (cur_.kind == Tok::Ident && cur_.text == "not") {
            Token not_tok = cur_;
            eat();
            Literal l = parse_literal(false);
            if (l.naf)
                throw SyntaxError(not_tok.line, not_tok.col, "single not",
                                  "doubled not");
            l.naf = true;
            return l;
        }
        return parse_literal(false);
    }

    Literal parse_literal(bool allow_wildcard) {
        Literal l;
        Token start = cur_;
        if (cur_.kind == Tok::Minus) {
            eat();
            l.negated = true;
        }
        Token name = expect(Tok::Ident, "predicate name");
        l.predicate = intern(name.text);
        if (cur_.kind == Tok::LParen) {
            eat();
            l.args.push_back(parse_term(allow_wildcard));
            while (cur_.kind == Tok::Comma) {
                eat();
                l.args.push_back(parse_term(allow_wildcard));
            }
            expect(Tok::RParen, "')'");
        }
        normalize_dynamic(l, start);
        return l;
    }

    Term parse_term(bool allow_wildcard) {
        if (cur_.kind == Tok::Var) {
            Term t = Term::var(intern(cur_.text));
            eat();
            return t;
        }
        if (cur_.kind == Tok::Wild) {
            if (!allow_wildcard)
                throw SyntaxError(cur_.line, cur_.col, "variable or constant",
                                  "wildcard _ is only allowed in del patterns");
            eat();
            return Term::wildcard();
        }
        Token tok = expect(Tok::Ident, "term");
        if (auto obj = parse_object(tok.text))
            return Term::object(*obj);
        return Term::symbol(intern(tok.text));
    }

    // Maps dynamic-relation literals to their normalized stored arity.
    void normalize_dynamic(Literal& l, const Token& at) {
        auto rel = relation_from_name(symbol_name(l.predicate));
        if (!rel)
            return;
        if (l.negated)
            throw SyntaxError(at.line, at.col, "no classical negation on state",
                              "dynamic relation cannot be classically negated: " +
                                  symbol_name(l.predicate));
        l.relation = *rel;
        int want = relation_arity(*rel);
        if (relation_agent_centric(*rel) &&
            static_cast<int>(l.args.size()) == want + 1 &&
            l.args[0].kind == Term::Kind::Object && is_agent(l.args[0].obj)) {
            l.args.erase(l.args.begin());
        }
        if (static_cast<int>(l.args.size()) != want)
            throw SyntaxError(at.line, at.col,
                              std::to_string(want) + " argument(s)",
                              "wrong arity for dynamic relation " +
                                  symbol_name(l.predicate));
    }

    ActionSchema parse_action(const Program& p) {
        Token kw = cur_;
        eat(); // action
        Token name = expect(Tok::Ident, "action name");
        ActionSchema a;
        a.name = intern(name.text);
        if (p.find_action(a.name) != nullptr)
            throw SyntaxError(name.line, name.col, "unique action name",
                              "duplicate action name: " + name.text);
        if (cur_.kind == Tok::LParen) {
            eat();
            if (cur_.kind != Tok::RParen) {
                a.params.push_back(intern(expect(Tok::Var, "parameter variable").text));
                while (cur_.kind == Tok::Comma) {
                    eat();
                    a.params.push_back(
                        intern(expect(Tok::Var, "parameter variable").text));
                }
            }
            expect(Tok::RParen, "')'");
        }
        expect(Tok::LBrace, "'{'");
        if (section_is("tag")) {
            eat_section_header();
            // Tags are CamelCase, which lexes as a variable token.
            if (cur_.kind != Tok::Ident && cur_.kind != Tok::Var)
                throw SyntaxError(cur_.line, cur_.col, "tag identifier",
                                  "expected tag identifier");
            a.tag = intern(cur_.text);
            eat();
            end_section();
        } else {
            a.tag = intern(default_tag(a.name));
        }
        expect_section("pre");
        if (cur_.kind != Tok::Semi && cur_.kind != Tok::RBrace)
            a.pre = parse_body();
        end_section();
        expect_section("add");
        a.add = parse_effects(false);
        end_section();
        expect_section("del");
        a.del = parse_effects(true);
        end_section();
        expect(Tok::RBrace, "'}'");
        check_action_safety(a, kw);
        return a;
    }

    std::vector<Effect> parse_effects(bool allow_wildcard) {
        std::vector<Effect> effs;
        if (cur_.kind == Tok::Semi || cur_.kind == Tok::RBrace)
            return effs;
        effs.push_back(parse_effect(allow_wildcard));
        while (cur_.kind == Tok::Comma) {
            eat();
            effs.push_back(parse_effect(allow_wildcard));
        }
        return effs;
    }

    Effect parse_effect(bool allow_wildcard) {
        Token at = cur_;
        Literal l = parse_literal(allow_wildcard);
        if (l.naf || l.negated)
            throw SyntaxError(at.line, at.col, "plain relation atom",
                              "effects cannot be negated");
        if (!l.relation)
            throw UnknownRelation(symbol_name(l.predicate));
        Effect e;
        e.relation = *l.relation;
        e.args = std::move(l.args);
        return e;
    }

    TaskDef parse_task() {
        eat(); // task
        Token name = expect(Tok::Ident, "task name");
        TaskDef t;
        t.name = intern(name.text);
        expect(Tok::LBrace, "'{'");
        expect_section("goal");
        t.goal = parse_body();
        end_section();
        if (section_is("room")) {
            eat_section_header();
            t.room_hint = intern(expect(Tok::Ident, "room class").text);
            end_section();
        }
        expect(Tok::RBrace, "'}'");
        check_task_safety(t, name);
        return t;
    }

    bool section_is(const char* kw) {
        return cur_.kind == Tok::Ident && cur_.text == kw;
    }

    // Sections end with ';'; the terminator may be omitted before '}'.
    void end_section() {
        if (cur_.kind == Tok::Semi)
            eat();
        else if (cur_.kind != Tok::RBrace)
            expect(Tok::Semi, "';'");
    }

    void eat_section_header() {
        eat();
        expect(Tok::Colon, "':'");
    }

    void expect_section(const char* kw) {
        if (!section_is(kw))
            throw SyntaxError(cur_.line, cur_.col, std::string("'") + kw + ":'",
                              "expected section " + std::string(kw));
        eat_section_header();
    }

    // ---- safety checks ----

    static void collect_vars(const Term& t, std::set<Symbol>& out) {
        if (t.kind == Term::Kind::Var)
            out.insert(t.sym);
    }

    static std::set<Symbol> positive_vars(const std::vector<Literal>& body) {
        std::set<Symbol> bound;
        for (const Literal& l : body) {
            if (l.naf || l.predicate == neq_symbol())
                continue;
            for (const Term& t : l.args)
                collect_vars(t, bound);
        }
        return bound;
    }

    void check_rule_safety(const Rule& r) {
        std::set<Symbol> bound = positive_vars(r.body);
        auto need = [&](const Term& t, const char* where) {
            if (t.kind == Term::Kind::Var && !bound.count(t.sym))
                throw UnsafeRule(std::string("unsafe rule: variable ") +
                                 symbol_name(t.sym) + " in " + where +
                                 " does not appear in a positive body literal: " +
                                 print_rule(r));
        };
        if (!r.is_constraint)
            for (const Term& t : r.head.args)
                need(t, "head");
        for (const Literal& l : r.body)
            if (l.naf || l.predicate == neq_symbol())
                for (const Term& t : l.args)
                    need(t, l.naf ? "negated literal" : "inequality");
    }

    void check_action_safety(const ActionSchema& a, const Token& at) {
        std::set<Symbol> bound = positive_vars(a.pre);
        for (Symbol p : a.params)
            bound.insert(p);
        for (const Literal& l : a.pre)
            if (l.naf || l.predicate == neq_symbol())
                for (const Term& t : l.args)
                    if (t.kind == Term::Kind::Var && !bound.count(t.sym))
                        throw UnsafeRule("unsafe action " + symbol_name(a.name) +
                                         ": variable " + symbol_name(t.sym) +
                                         " is not bound by params or a positive "
                                         "precondition");
        std::set<Symbol> pre_vars = positive_vars(a.pre);
        for (const Literal& l : a.pre)
            for (const Term& t : l.args)
                collect_vars(t, pre_vars);
        for (Symbol p : a.params)
            if (!pre_vars.count(p))
                throw UnsafeRule("action " + symbol_name(a.name) + ": parameter " +
                                 symbol_name(p) + " does not appear in pre");
        std::set<Symbol> params(a.params.begin(), a.params.end());
        for (const std::vector<Effect>* effs : {&a.add, &a.del})
            for (const Effect& e : *effs)
                for (const Term& t : e.args)
                    if (t.kind == Term::Kind::Var && !params.count(t.sym))
                        throw UnsafeRule("action " + symbol_name(a.name) +
                                         ": effect variable " + symbol_name(t.sym) +
                                         " is not a parameter");
        for (const Effect& e : a.add)
            for (const Term& t : e.args)
                if (t.kind == Term::Kind::Wildcard)
                    throw SyntaxError(at.line, at.col, "ground add effect",
                                      "add effects cannot use wildcards");
        (void)at;
    }

    void check_task_safety(const TaskDef& t, const Token& at) {
        std::set<Symbol> bound = positive_vars(t.goal);
        for (const Literal& l : t.goal)
            if (l.naf || l.predicate == neq_symbol())
                for (const Term& term : l.args)
                    if (term.kind == Term::Kind::Var && !bound.count(term.sym))
                        throw UnsafeRule("task " + symbol_name(t.name) +
                                         ": variable " + symbol_name(term.sym) +
                                         " in a negated goal literal is not bound "
                                         "by a positive goal literal");
        (void)at;
    }

    void check_program(const Program& p) {
        // Catches duplicates introduced across include boundaries; same-file
        // duplicates were already rejected in parse_action.
        std::set<Symbol> seen;
        for (const ActionSchema& a : p.actions)
            if (!seen.insert(a.name).second)
                throw SyntaxError(0, 0, "unique action name",
                                  lex_.source() + ": duplicate action name: " +
                                      symbol_name(a.name));
    }

    Token expect(Tok k, const std::string& what) {
        if (cur_.kind != k)
            throw SyntaxError(cur_.line, cur_.col, what,
                              lex_.source() + ":" + std::to_string(cur_.line) + ":" +
                                  std::to_string(cur_.col) + ": expected " + what);
        Token t = cur_;
        eat();
        return t;
    }

    void eat() { cur_ = lex_.next(); }

    Lexer lex_;
    Token cur_;
    std::filesystem::path base_dir_;
    std::set<std::string>* include_stack_;
};

} // namespace

Program parse_program(const std::string& text, const std::string& source_name) {
    Parser p(text, source_name, {}, nullptr);
    return p.parse();
}

Program parse_program_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SyntaxError(0, 0, "readable file", "cannot open program file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::set<std::string> stack;
    stack.insert(std::filesystem::weakly_canonical(path).string());
    Parser p(text, path, std::filesystem::path(path).parent_path(), &stack);
    return p.parse();
}

std::vector<Literal> parse_query(const std::string& text) {
    Parser p(text, "<query>", {}, nullptr);
    return p.parse_query_body();
}

std::string print_rule(const Rule& r) {
    std::string out;
    if (!r.is_constraint)
        out += render_literal(r.head);
    if (r.is_constraint || !r.body.empty()) {
        if (!r.is_constraint)
            out += ' ';
        out += ":- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i)
                out += ", ";
            out += render_literal(r.body[i]);
        }
    }
    out += '.';
    return out;
}

namespace {

std::string render_effect(const Effect& e) {
    std::string out = relation_name(e.relation);
    out += '(';
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i)
            out += ", ";
        out += render_term(e.args[i]);
    }
    out += ')';
    return out;
}

std::string render_effects(const std::vector<Effect>& effs) {
    std::string out;
    for (std::size_t i = 0; i < effs.size(); ++i) {
        if (i)
            out += ", ";
        out += render_effect(effs[i]);
    }
    return out;
}

std::string render_body(const std::vector<Literal>& body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i)
            out += ", ";
        out += render_literal(body[i]);
    }
    return out;
}

} // namespace

std::string print_action(const ActionSchema& a) {
    std::string out = "action " + symbol_name(a.name);
    out += '(';
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (i)
            out += ", ";
        out += symbol_name(a.params[i]);
    }
    out += ") {\n";
    out += "  tag: " + symbol_name(a.tag) + ";\n";
    out += "  pre: " + render_body(a.pre) + ";\n";
    out += "  add: " + render_effects(a.add) + ";\n";
    out += "  del: " + render_effects(a.del) + ";\n";
    out += "}";
    return out;
}

std::string print_task(const TaskDef& t) {
    std::string out = "task " + symbol_name(t.name) + " {\n";
    out += "  goal: " + render_body(t.goal) + ";\n";
    if (t.room_hint != kNoSymbol)
        out += "  room: " + symbol_name(t.room_hint) + ";\n";
    out += "}";
    return out;
}

std::string print_program(const Program& p) {
    std::ostringstream os;
    for (const Rule& r : p.clauses)
        os << print_rule(r) << '\n';
    for (const ActionSchema& a : p.actions)
        os << print_action(a) << '\n';
    for (const TaskDef& t : p.tasks)
        os << print_task(t) << '\n';
    return os.str();
}

} // namespace vecsr
