#include "vecsr/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vecsr {
namespace {

using nlohmann::json;

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

// Class and category tags become predicate names: lowercase, underscores
// stripped ("light_source" -> lightsource).
std::string normalize_category(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '_')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::string normalize_class(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == ' ')
            continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

[[noreturn]] void schema_error(const std::string& msg) {
    throw SceneError(SceneErrorKind::SchemaError, msg);
}

} // namespace

const char* edge_relation_name(EdgeRelation r) {
    switch (r) {
    case EdgeRelation::Close: return "CLOSE";
    case EdgeRelation::OnTopOf: return "ON_TOP_OF";
    case EdgeRelation::Inside: return "INSIDE";
    case EdgeRelation::Facing: return "FACING";
    case EdgeRelation::Holds: return "HOLDS";
    }
    return "?";
}

Symbol rooms_category() {
    static const Symbol s = intern("rooms");
    return s;
}

Symbol agents_category() {
    static const Symbol s = intern("agents");
    return s;
}

Symbol unplaced_room_class() {
    static const Symbol s = intern("unplaced");
    return s;
}

const SceneNode* SceneGraph::find(const ObjectId& id) const {
    for (const SceneNode& n : nodes)
        if (n.id == id)
            return &n;
    return nullptr;
}

bool SceneGraph::is_room(const ObjectId& id) const {
    const SceneNode* n = find(id);
    return n != nullptr && n->category == rooms_category();
}

ObjectId SceneGraph::room_of(const ObjectId& id) const {
    if (is_room(id))
        return id;
    auto it = rooms.find(id);
    if (it != rooms.end())
        return it->second;
    return ObjectId{unplaced_room_class(), 0};
}

SceneGraph ingest_scene(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        schema_error(std::string("scene document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
        schema_error("scene document must be an object with nodes and edges");
    if (!doc["nodes"].is_array() || !doc["edges"].is_array())
        schema_error("nodes and edges must be arrays");

    SceneGraph g;
    std::unordered_map<std::int64_t, std::size_t> by_raw_id;

    for (const json& jn : doc["nodes"]) {
        if (!jn.is_object() || !jn.contains("id") || !jn.contains("class_name"))
            schema_error("node missing id or class_name");
        if (!jn["id"].is_number_integer())
            schema_error("node id must be an integer");
        std::int64_t raw = jn["id"].get<std::int64_t>();
        if (raw < 1)
            schema_error("node id must be >= 1, got " + std::to_string(raw));
        if (by_raw_id.count(raw))
            throw SceneError(SceneErrorKind::DuplicateId,
                             "duplicate node id " + std::to_string(raw));

        SceneNode n;
        std::string cls = normalize_class(jn["class_name"].get<std::string>());
        if (cls.empty() || std::isdigit(static_cast<unsigned char>(cls.back())))
            schema_error("class_name must be a plain identifier: " +
                         jn["class_name"].get<std::string>());
        n.class_name = intern(cls);
        n.id = ObjectId{n.class_name, static_cast<std::int32_t>(raw)};
        if (jn.contains("category")) {
            n.category = intern(normalize_category(jn["category"].get<std::string>()));
        }
        if (jn.contains("properties")) {
            for (const json& p : jn["properties"])
                n.properties.push_back(intern(to_lower(p.get<std::string>())));
        }
        if (jn.contains("states")) {
            for (const json& s : jn["states"]) {
                std::string tag = s.get<std::string>();
                if (tag != "ON" && tag != "OFF" && tag != "OPEN" && tag != "CLOSED" &&
                    tag != "CLEAN" && tag != "DIRTY")
                    schema_error("unknown node state tag: " + tag);
                n.states.push_back(intern(tag));
            }
        }
        if (n.category == agents_category()) {
            if (g.agent.name != kNoSymbol)
                schema_error("scene has more than one agent node");
            // The agent is a singleton constant: its id is always agent/1
            // regardless of the raw node id.
            n.id = ObjectId{agent_symbol(), 1};
            n.class_name = agent_symbol();
            g.agent = n.id;
        } else if (n.class_name == agent_symbol()) {
            schema_error("class_name 'agent' is reserved for the Agents category");
        }
        by_raw_id.emplace(raw, g.nodes.size());
        g.nodes.push_back(std::move(n));
    }

    for (const json& je : doc["edges"]) {
        if (!je.is_object() || !je.contains("from_id") || !je.contains("to_id") ||
            !je.contains("relation_type"))
            schema_error("edge missing from_id, to_id or relation_type");
        std::int64_t from_raw = je["from_id"].get<std::int64_t>();
        std::int64_t to_raw = je["to_id"].get<std::int64_t>();
        auto from_it = by_raw_id.find(from_raw);
        auto to_it = by_raw_id.find(to_raw);
        if (from_it == by_raw_id.end() || to_it == by_raw_id.end())
            throw SceneError(SceneErrorKind::DanglingEdge,
                             "edge references unknown node id " +
                                 std::to_string(from_it == by_raw_id.end() ? from_raw
                                                                           : to_raw));
        std::string rel = je["relation_type"].get<std::string>();
        EdgeRelation er;
        if (rel == "CLOSE")
            er = EdgeRelation::Close;
        else if (rel == "ON_TOP_OF" || rel == "ON")
            er = EdgeRelation::OnTopOf;
        else if (rel == "INSIDE")
            er = EdgeRelation::Inside;
        else if (rel == "FACING")
            er = EdgeRelation::Facing;
        else if (rel == "HOLDS_RH" || rel == "HOLDS_LH" || rel == "HOLDS")
            er = EdgeRelation::Holds;
        else
            schema_error("unknown edge relation_type: " + rel);
        g.edges.push_back(SceneEdge{g.nodes[from_it->second].id, er,
                                    g.nodes[to_it->second].id});
    }

    // Room derivation: follow inside edges (transitively) to a Rooms node.
    std::unordered_map<ObjectId, ObjectId, ObjectHash> parent;
    for (const SceneEdge& e : g.edges)
        if (e.relation == EdgeRelation::Inside)
            parent.emplace(e.from, e.to);
    for (const SceneNode& n : g.nodes) {
        if (n.category == rooms_category()) {
            g.room_ids.push_back(n.id);
            continue;
        }
        ObjectId cur = n.id;
        ObjectId room{unplaced_room_class(), 0};
        for (int hop = 0; hop < 8; ++hop) {
            auto it = parent.find(cur);
            if (it == parent.end()) {
                // Stacked objects inherit the room of what they rest on.
                bool moved = false;
                for (const SceneEdge& e : g.edges) {
                    if (e.relation == EdgeRelation::OnTopOf && e.from == cur) {
                        cur = e.to;
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                break;
            }
            cur = it->second;
            if (g.is_room(cur)) {
                room = cur;
                break;
            }
        }
        g.rooms.emplace(n.id, room);
    }
    bool any_unplaced = false;
    for (const auto& [obj, room] : g.rooms)
        if (room.name == unplaced_room_class())
            any_unplaced = true;
    if (any_unplaced)
        g.room_ids.push_back(ObjectId{unplaced_room_class(), 0});
    return g;
}

SceneGraph ingest_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        schema_error("cannot open scene file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_scene(buf.str());
}

} // namespace vecsr
