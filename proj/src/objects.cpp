#include "vecsr/objects.hpp"

#include <cctype>

namespace vecsr {

Symbol agent_symbol() {
    static const Symbol s = intern("agent");
    return s;
}

bool is_agent(const ObjectId& id) {
    return id.name == agent_symbol();
}

bool object_less(const ObjectId& a, const ObjectId& b) {
    if (a.index != b.index)
        return a.index < b.index;
    if (a.name == b.name)
        return false;
    return symbol_name(a.name) < symbol_name(b.name);
}

std::string render_object(const ObjectId& id) {
    if (is_agent(id))
        return "agent";
    return symbol_name(id.name) + std::to_string(id.index);
}

std::optional<ObjectId> parse_object(std::string_view token) {
    if (token == "agent")
        return ObjectId{agent_symbol(), 1};
    std::size_t digits = 0;
    while (digits < token.size() &&
           std::isdigit(static_cast<unsigned char>(token[token.size() - 1 - digits])))
        ++digits;
    if (digits == 0 || digits == token.size())
        return std::nullopt;
    std::string_view stem = token.substr(0, token.size() - digits);
    std::string_view num = token.substr(token.size() - digits);
    std::int32_t index = 0;
    for (char c : num)
        index = index * 10 + (c - '0');
    return ObjectId{intern(stem), index};
}

} // namespace vecsr
