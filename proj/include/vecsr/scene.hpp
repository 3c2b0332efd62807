#pragma once

#include "vecsr/state.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vecsr {

enum class EdgeRelation : std::uint8_t { Close, OnTopOf, Inside, Facing, Holds };

const char* edge_relation_name(EdgeRelation r);

struct SceneNode {
    ObjectId id;
    Symbol class_name = kNoSymbol;
    Symbol category = kNoSymbol;
    std::vector<Symbol> properties; // lowercased tags, e.g. has_switch
    std::vector<Symbol> states;     // raw uppercase tags, e.g. ON
};

struct SceneEdge {
    ObjectId from;
    EdgeRelation relation = EdgeRelation::Close;
    ObjectId to;
};

struct SceneGraph {
    std::vector<SceneNode> nodes;
    std::vector<SceneEdge> edges;
    // Room assignment for every non-room node reachable through inside edges;
    // objects with no room land in the synthetic "unplaced" room.
    std::map<ObjectId, ObjectId, bool (*)(const ObjectId&, const ObjectId&)> rooms{
        object_less};
    std::vector<ObjectId> room_ids; // in node order, unplaced last if present
    ObjectId agent;

    const SceneNode* find(const ObjectId& id) const;
    bool is_room(const ObjectId& id) const;
    ObjectId room_of(const ObjectId& id) const;
};

enum class SceneErrorKind : std::uint8_t { SchemaError, DanglingEdge, DuplicateId };

struct SceneError : std::runtime_error {
    SceneErrorKind kind;
    SceneError(SceneErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

// Parses a scene document (environment-graph JSON) and derives rooms.
SceneGraph ingest_scene(const std::string& json_text);
SceneGraph ingest_scene_file(const std::string& path);

Symbol rooms_category();
Symbol agents_category();
Symbol unplaced_room_class();

} // namespace vecsr
