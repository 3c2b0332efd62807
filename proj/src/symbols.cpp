#include "vecsr/symbols.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace vecsr {
namespace {

struct Table {
    std::mutex mu;
    std::unordered_map<std::string, Symbol> ids;
    // Deque keeps name references stable while other threads intern.
    std::deque<std::string> names;

    Table() { names.emplace_back(""); }
};

Table& table() {
    static Table t;
    return t;
}

} // namespace

Symbol intern(std::string_view text) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.ids.find(std::string(text));
    if (it != t.ids.end())
        return it->second;
    Symbol id = static_cast<Symbol>(t.names.size());
    t.names.emplace_back(text);
    t.ids.emplace(std::string(text), id);
    return id;
}

const std::string& symbol_name(Symbol s) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.names.at(s);
}

bool symbol_known(std::string_view text) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.ids.count(std::string(text)) > 0;
}

} // namespace vecsr
