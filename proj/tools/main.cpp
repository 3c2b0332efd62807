// vecsr: scene ingestion, KB compilation, planning, script execution and
// scoring, the timing sweep, the generalization study, and synthetic scene
// generation.

#include "vecsr/bench.hpp"
#include "vecsr/executor.hpp"
#include "vecsr/optimizer.hpp"
#include "vecsr/parser.hpp"
#include "vecsr/planner.hpp"
#include "vecsr/scene.hpp"
#include "vecsr/solver.hpp"
#include "vecsr/world_model.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vecsr;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << text;
}

// Optional key=value defaults; '#' starts a comment.
struct Defaults {
    int max_depth = 50;
    long max_expansions = 100000;
    double timeout_s = 600.0;
    int repetitions = 5;
};

Defaults load_defaults(const std::string& config_path) {
    Defaults d;
    if (config_path.empty())
        return d;
    std::istringstream in(read_file(config_path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line.substr(0, line.find('#'));
        auto first = stripped.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw IoError(config_path + ":" + std::to_string(lineno) +
                          ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "max_depth")
                d.max_depth = std::stoi(value);
            else if (key == "max_expansions")
                d.max_expansions = std::stol(value);
            else if (key == "timeout_s")
                d.timeout_s = std::stod(value);
            else if (key == "repetitions")
                d.repetitions = std::stoi(value);
            else
                throw IoError(config_path + ": unknown key " + key);
        } catch (const std::invalid_argument&) {
            throw IoError(config_path + ": bad value for " + key);
        }
    }
    return d;
}

// VECSR_TIMEOUT_S overrides any configured or flagged timeout.
double apply_timeout_env(double timeout_s) {
    if (const char* env = std::getenv("VECSR_TIMEOUT_S")) {
        try {
            return std::stod(env);
        } catch (const std::exception&) {
            throw IoError("VECSR_TIMEOUT_S is not a number");
        }
    }
    return timeout_s;
}

PlanLimits make_limits(const Defaults& d) {
    PlanLimits limits;
    limits.max_depth = d.max_depth;
    limits.max_expansions = d.max_expansions;
    limits.wall_timeout_s = apply_timeout_env(d.timeout_s);
    return limits;
}

Program load_kb(const std::string& kb_path, const std::string& extra_path) {
    Program p = parse_program_file(kb_path);
    if (!extra_path.empty()) {
        Program extra = parse_program_file(extra_path);
        p.clauses.insert(p.clauses.end(), extra.clauses.begin(),
                         extra.clauses.end());
        p.actions.insert(p.actions.end(), extra.actions.begin(),
                         extra.actions.end());
        p.tasks.insert(p.tasks.end(), extra.tasks.begin(), extra.tasks.end());
    }
    return p;
}

const TaskDef& need_task(const Program& p, const std::string& name) {
    if (const TaskDef* t = p.find_task(intern(name)))
        return *t;
    std::ostringstream msg;
    msg << "unknown task " << name << "; available:";
    for (const TaskDef& t : p.tasks)
        msg << ' ' << symbol_name(t.name);
    throw IoError(msg.str());
}

OptLevel need_level(const std::string& name) {
    if (auto l = opt_level_from_name(name))
        return *l;
    throw IoError("unknown optimization level " + name +
                  "; expected standard, modular, depgraph, ground, or full");
}

std::string render_goal(const std::vector<Literal>& goal) {
    std::string out;
    for (std::size_t i = 0; i < goal.size(); ++i) {
        if (i)
            out += ", ";
        out += render_literal(goal[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Compiled-KB artifact (JSON)

const char* fact_class_tag(FactClass c) {
    switch (c) {
    case FactClass::Type:
        return "type";
    case FactClass::Attribute:
        return "attribute";
    case FactClass::State:
        return "state";
    case FactClass::Category:
        return "category";
    }
    return "?";
}

FactClass fact_class_from_tag(const std::string& t) {
    if (t == "type")
        return FactClass::Type;
    if (t == "attribute")
        return FactClass::Attribute;
    if (t == "state")
        return FactClass::State;
    if (t == "category")
        return FactClass::Category;
    throw IoError("bad fact class " + t);
}

json artifact_to_json(const CompiledKB& kb, const std::string& task_name) {
    json statics = json::array();
    for (std::size_t i = 0; i < kb.facts.statics.size(); ++i) {
        const StaticFact& sf = kb.facts.statics[i];
        json entry;
        entry["pred"] = symbol_name(sf.predicate);
        if (sf.negated)
            entry["neg"] = true;
        entry["subject"] = render_object(sf.subject);
        if (sf.class_arg != kNoSymbol)
            entry["class"] = symbol_name(sf.class_arg);
        entry["kind"] = fact_class_tag(kb.facts.classes[i]);
        statics.push_back(std::move(entry));
    }

    json state;
    for (RelationKind rel : all_relations()) {
        json tuples = json::array();
        for (const Tuple& t : kb.facts.state.list(rel)) {
            json tup = json::array();
            for (const ObjectId& o : t)
                tup.push_back(render_object(o));
            tuples.push_back(std::move(tup));
        }
        state[relation_name(rel)] = std::move(tuples);
    }

    json bindings;
    for (const auto& [var, term] : kb.bindings)
        bindings[symbol_name(var)] = render_term(term);

    json prov = json::array();
    for (const Provenance::Item& item : kb.provenance.dropped)
        prov.push_back(
            {{"stage", item.stage}, {"kind", item.kind}, {"item", item.item}});

    return json{{"format", "vecsr-compiled-kb"},
                {"version", 1},
                {"level", opt_level_name(kb.level)},
                {"task", task_name},
                {"goal", render_goal(kb.goal)},
                {"bindings", std::move(bindings)},
                {"program", print_program(kb.program)},
                {"statics", std::move(statics)},
                {"state", std::move(state)},
                {"warnings", kb.warnings},
                {"provenance", std::move(prov)}};
}

ObjectId need_object(const std::string& token) {
    if (auto o = parse_object(token))
        return *o;
    throw IoError("bad object token " + token);
}

CompiledKB artifact_from_json(const json& j, std::string& task_name) {
    if (!j.is_object() || j.value("format", "") != "vecsr-compiled-kb")
        throw IoError("not a compiled-KB artifact");
    CompiledKB kb;
    kb.level = need_level(j.at("level").get<std::string>());
    task_name = j.at("task").get<std::string>();
    kb.program = parse_program(j.at("program").get<std::string>(),
                               "<artifact program>");
    kb.goal = parse_query(j.at("goal").get<std::string>());

    for (const json& entry : j.at("statics")) {
        StaticFact sf;
        sf.predicate = intern(entry.at("pred").get<std::string>());
        sf.negated = entry.value("neg", false);
        sf.subject = need_object(entry.at("subject").get<std::string>());
        if (entry.contains("class"))
            sf.class_arg = intern(entry.at("class").get<std::string>());
        kb.facts.statics.push_back(sf);
        kb.facts.classes.push_back(
            fact_class_from_tag(entry.at("kind").get<std::string>()));
    }

    const json& state = j.at("state");
    for (RelationKind rel : all_relations()) {
        if (!state.contains(relation_name(rel)))
            continue;
        for (const json& tup : state.at(relation_name(rel))) {
            Tuple t;
            for (const json& o : tup)
                t.push_back(need_object(o.get<std::string>()));
            kb.facts.state.add(rel, t);
        }
    }

    if (j.contains("bindings"))
        for (const auto& [var, value] : j.at("bindings").items()) {
            std::string v = value.get<std::string>();
            if (auto obj = parse_object(v))
                kb.bindings[intern(var)] = Term::object(*obj);
            else
                kb.bindings[intern(var)] = Term::symbol(intern(v));
        }
    if (j.contains("warnings"))
        kb.warnings = j.at("warnings").get<std::vector<std::string>>();
    return kb;
}

// ---------------------------------------------------------------------------
// Synthetic scene growth

struct DistractorClass {
    const char* cls;
    const char* category;
    std::vector<const char*> props;
    double on_surface_p; // chance to sit on a surface in its room
    double on_p;         // chance to start switched on
    double dirty_p;      // chance to start dirty
};

const std::vector<DistractorClass>& distractor_pool() {
    static const std::vector<DistractorClass> pool = {
        {"book", "Props", {"GRABBABLE"}, 0.6, 0, 0},
        {"cup", "Props", {"GRABBABLE"}, 0.7, 0, 0},
        {"plate", "Props", {"GRABBABLE"}, 0.7, 0, 0.3},
        {"pillow", "Props", {"GRABBABLE"}, 0.3, 0, 0},
        {"remote", "Electronics", {"GRABBABLE"}, 0.5, 0, 0},
        {"candle", "Decor", {"GRABBABLE"}, 0.5, 0, 0},
        {"vase", "Decor", {"GRABBABLE"}, 0.5, 0, 0},
        {"folder", "Props", {"GRABBABLE"}, 0.5, 0, 0},
        {"lamp", "Lamps", {"HAS_SWITCH"}, 0.2, 0.4, 0},
        {"fan", "Appliances", {"HAS_SWITCH"}, 0, 0.2, 0},
        {"radio", "Electronics", {"HAS_SWITCH"}, 0.4, 0.2, 0},
        {"stool", "Furniture", {"SITTABLE"}, 0, 0, 0},
        {"armchair", "Furniture", {"SITTABLE"}, 0, 0, 0},
        {"ottoman", "Furniture", {"SITTABLE"}, 0, 0, 0},
        {"sidetable", "Furniture", {"SURFACE"}, 0, 0, 0},
        {"tray", "Props", {"SURFACE"}, 0, 0, 0},
        {"wardrobe", "Furniture", {"CAN_OPEN"}, 0, 0, 0},
        {"crate", "Props", {"CAN_OPEN"}, 0, 0, 0},
        {"painting", "Decor", {}, 0, 0, 0},
        {"plant", "Decor", {}, 0, 0, 0},
        {"rug", "Decor", {}, 0, 0, 0},
        {"statue", "Decor", {}, 0, 0, 0},
        {"mirror", "Decor", {}, 0, 0, 0},
    };
    return pool;
}

json grow_scene(json doc, int target_objects, unsigned seed) {
    std::mt19937 rng(seed);

    std::vector<int> room_ids;
    std::map<int, std::vector<int>> surfaces_by_room; // room -> surface ids
    std::map<int, int> room_of;                       // object -> room
    int max_id = 0;

    for (const json& node : doc.at("nodes")) {
        int id = node.at("id").get<int>();
        max_id = std::max(max_id, id);
        if (node.value("category", "") == "Rooms")
            room_ids.push_back(id);
    }
    if (room_ids.empty())
        throw IoError("base scene has no rooms");

    for (const json& edge : doc.at("edges"))
        if (edge.at("relation_type") == "INSIDE") {
            int from = edge.at("from_id").get<int>();
            int to = edge.at("to_id").get<int>();
            if (std::count(room_ids.begin(), room_ids.end(), to))
                room_of[from] = to;
        }
    for (const json& node : doc.at("nodes")) {
        int id = node.at("id").get<int>();
        if (!room_of.count(id))
            continue;
        for (const json& p : node.value("properties", json::array()))
            if (p == "SURFACE")
                surfaces_by_room[room_of[id]].push_back(id);
    }

    int have = static_cast<int>(doc.at("nodes").size());
    int next_id = std::max(max_id + 1, 100); // distractors never shadow ids < 100
    std::uniform_int_distribution<std::size_t> pick_class(
        0, distractor_pool().size() - 1);
    std::uniform_int_distribution<std::size_t> pick_room(0,
                                                         room_ids.size() - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    while (have < target_objects) {
        const DistractorClass& dc = distractor_pool()[pick_class(rng)];
        int room = room_ids[pick_room(rng)];
        int id = next_id++;

        json node;
        node["id"] = id;
        node["class_name"] = dc.cls;
        node["category"] = dc.category;
        if (!dc.props.empty()) {
            json props = json::array();
            for (const char* p : dc.props)
                props.push_back(p);
            node["properties"] = std::move(props);
        }
        json states = json::array();
        if (dc.on_p > 0 && coin(rng) < dc.on_p)
            states.push_back("ON");
        if (dc.dirty_p > 0 && coin(rng) < dc.dirty_p)
            states.push_back("DIRTY");
        if (!states.empty())
            node["states"] = std::move(states);
        doc["nodes"].push_back(std::move(node));

        doc["edges"].push_back(
            {{"from_id", id}, {"relation_type", "INSIDE"}, {"to_id", room}});
        const std::vector<int>& surfaces = surfaces_by_room[room];
        if (!surfaces.empty() && coin(rng) < dc.on_surface_p) {
            std::uniform_int_distribution<std::size_t> pick_surface(
                0, surfaces.size() - 1);
            doc["edges"].push_back({{"from_id", id},
                                    {"relation_type", "ON_TOP_OF"},
                                    {"to_id", surfaces[pick_surface(rng)]}});
        }
        for (const char* p : dc.props)
            if (std::string(p) == "SURFACE")
                surfaces_by_room[room].push_back(id);
        room_of[id] = room;
        ++have;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_ingest(const std::string& scene_path, const std::string& out_path) {
    SceneGraph scene = ingest_scene_file(scene_path);
    FactBase facts = to_facts(scene);
    facts.state = initial_state(facts, scene);
    std::string text = render_fact_base(facts);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

int cmd_compile(const std::string& scene_path, const std::string& kb_path,
                const std::string& task_name, const std::string& level_name,
                const std::string& out_path, bool dump_provenance) {
    SceneGraph scene = ingest_scene_file(scene_path);
    FactBase facts = to_facts(scene);
    facts.state = initial_state(facts, scene);
    Program program = parse_program_file(kb_path);
    const TaskDef& task = need_task(program, task_name);
    CompiledKB kb =
        optimize(program, facts, scene, task, need_level(level_name));

    for (const std::string& w : kb.warnings)
        std::cerr << "warning: " << w << '\n';
    if (dump_provenance)
        std::cout << render_provenance(kb.provenance);

    json artifact = artifact_to_json(kb, task_name);
    if (out_path.empty())
        std::cout << artifact.dump(2) << '\n';
    else
        write_file(out_path, artifact.dump(2) + "\n");
    return 0;
}

int report_failure(const PlanResult& result) {
    std::cerr << "planning failed ("
              << failure_reason_name(result.failure->reason)
              << "): " << result.failure->detail << '\n';
    for (const std::string& gap : result.failure->capability_gaps)
        std::cerr << "capability gap: " << gap << '\n';
    return 2;
}

int report_plan(const CompiledKB& kb, const TaskDef& task,
                const PlanLimits& limits, bool fallback, const Program& program,
                const FactBase& facts, const SceneGraph* scene,
                const std::string& out_path, bool justify,
                const std::string& justify_out) {
    PlanResult result;
    if (fallback && scene) {
        FallbackResult fb = plan_with_fallback(program, facts, *scene, task,
                                               kb.level, limits);
        result = std::move(fb.result);
        if (fb.levels_tried.size() > 1) {
            std::cerr << "fallback ladder:";
            for (OptLevel l : fb.levels_tried)
                std::cerr << ' ' << opt_level_name(l);
            std::cerr << '\n';
        }
        if (!result.ok())
            return report_failure(result);
        std::string text = render_plan(fb.kb.program, *result.plan);
        if (out_path.empty())
            std::cout << text;
        else
            write_file(out_path, text);
        if (justify || !justify_out.empty()) {
            std::string trace = render_trace(fb.kb.program, result.trace);
            if (justify_out.empty())
                std::cout << trace;
            else
                write_file(justify_out, trace);
        }
        return 0;
    }

    result = plan(kb, task, limits);
    if (!result.ok())
        return report_failure(result);
    std::string text = render_plan(kb.program, *result.plan);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    if (justify || !justify_out.empty()) {
        std::string trace = render_trace(kb.program, result.trace);
        if (justify_out.empty())
            std::cout << trace;
        else
            write_file(justify_out, trace);
    }
    return 0;
}

int cmd_exec(const std::string& scene_path, const std::string& kb_path,
             const std::string& script_path) {
    SceneGraph scene = ingest_scene_file(scene_path);
    Program program = parse_program_file(kb_path);
    WorldModel world = make_world(scene, program);

    ScriptParse parsed = parse_script(read_file(script_path));
    if (!parsed.ok) {
        std::cerr << script_path << ":" << parsed.bad_line << ": "
                  << parsed.error << '\n';
        return 1;
    }
    ExecutionResult result = execute(world, parsed.script);
    std::cout << render_execution_log(result);
    if (!result.completed) {
        std::cerr << "execution failed at step " << result.failed_step << ": "
                  << result.reason << '\n';
        return 2;
    }
    return 0;
}

int cmd_score(const std::string& scene_path, const std::string& kb_path,
              const std::string& script_path, const std::string& task_name) {
    SceneGraph scene = ingest_scene_file(scene_path);
    Program program = parse_program_file(kb_path);
    const TaskDef& task = need_task(program, task_name);
    WorldModel world = make_world(scene, program);
    ScriptScore score = score_script(world, read_file(script_path), task);

    json out{{"parsed", score.parsed},
             {"executable", score.executable},
             {"correct", score.correct}};
    if (score.first_bad_step)
        out["first_bad_step"] = *score.first_bad_step;
    else
        out["first_bad_step"] = nullptr;
    if (!score.reason.empty())
        out["reason"] = score.reason;
    std::cout << out.dump() << '\n';
    return 0;
}

int cmd_bench(const std::string& scene_path, const std::string& kb_path,
              const std::string& tasks_csv, const std::string& levels_csv,
              int repetitions, double timeout_s, const Defaults& defaults,
              const std::string& csv_path) {
    SceneGraph scene = ingest_scene_file(scene_path);
    FactBase facts = to_facts(scene);
    facts.state = initial_state(facts, scene);
    Program program = parse_program_file(kb_path);

    BenchSpec spec;
    spec.repetitions = repetitions;
    spec.timeout_s = apply_timeout_env(timeout_s);
    spec.limits = make_limits(defaults);

    if (tasks_csv.empty()) {
        for (const TaskDef& t : program.tasks)
            spec.tasks.push_back(symbol_name(t.name));
    } else {
        std::istringstream in(tasks_csv);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty())
                spec.tasks.push_back(item);
    }
    if (levels_csv.empty()) {
        spec.levels = {OptLevel::Standard, OptLevel::Modular, OptLevel::DepGraph,
                       OptLevel::PartialGround, OptLevel::Full};
    } else {
        std::istringstream in(levels_csv);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty())
                spec.levels.push_back(need_level(item));
    }

    BenchReport report = run_bench(spec, program, facts, scene);
    std::string csv = render_bench_csv(report);
    if (csv_path.empty())
        std::cout << csv;
    else
        write_file(csv_path, csv);
    return report.had_timeouts ? 3 : 0;
}

int cmd_generalize(const std::string& scene_path, const std::string& kb_path,
                   const std::string& holdout_dir,
                   const std::string& extra_path, const std::string& level_name,
                   int parallel, const Defaults& defaults,
                   const std::string& report_path) {
    SceneGraph scene = ingest_scene_file(scene_path);
    FactBase facts = to_facts(scene);
    facts.state = initial_state(facts, scene);
    Program kb = load_kb(kb_path, extra_path);

    std::vector<fs::path> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(holdout_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".vkb")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no .vkb task files in " + holdout_dir);

    std::vector<TaskDef> tasks;
    for (const fs::path& f : files) {
        Program p = parse_program_file(f.string());
        if (p.tasks.empty())
            throw IoError(f.string() + " defines no task");
        tasks.insert(tasks.end(), p.tasks.begin(), p.tasks.end());
    }

    HoldoutReport report =
        run_generalize(kb, facts, scene, tasks, need_level(level_name),
                       make_limits(defaults), parallel);
    std::string text = render_holdout_report(report);
    if (report_path.empty())
        std::cout << text;
    else
        write_file(report_path, text);
    return 0;
}

int cmd_gen_scene(const std::string& base_path, int objects, unsigned seed,
                  const std::string& out_path) {
    json doc;
    if (base_path.empty()) {
        doc = {{"nodes", json::array()}, {"edges", json::array()}};
        doc["nodes"].push_back({{"id", 10},
                                {"class_name", "hallway"},
                                {"category", "Rooms"}});
        doc["nodes"].push_back({{"id", 11},
                                {"class_name", "kitchen"},
                                {"category", "Rooms"}});
        doc["nodes"].push_back({{"id", 12},
                                {"class_name", "bathroom"},
                                {"category", "Rooms"}});
        doc["nodes"].push_back({{"id", 13},
                                {"class_name", "bedroom"},
                                {"category", "Rooms"}});
        doc["nodes"].push_back({{"id", 14},
                                {"class_name", "livingroom"},
                                {"category", "Rooms"}});
        doc["nodes"].push_back({{"id", 1},
                                {"class_name", "character"},
                                {"category", "Agents"}});
        doc["edges"].push_back(
            {{"from_id", 1}, {"relation_type", "INSIDE"}, {"to_id", 10}});
    } else {
        doc = json::parse(read_file(base_path));
    }

    doc = grow_scene(std::move(doc), objects, seed);
    std::string text = doc.dump(2) + "\n";
    ingest_scene(text); // validate before writing
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"goal-directed household task planner"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "key=value defaults (max_depth, max_expansions, timeout_s, "
                   "repetitions)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "dump a scene as a fact base");
    std::string in_scene, in_out;
    ingest->add_option("--scene", in_scene, "scene JSON")->required();
    ingest->add_option("--out", in_out, "output file (default stdout)");

    // compile
    auto* compile =
        app.add_subcommand("compile", "optimize a KB against a task");
    std::string c_scene, c_kb, c_task, c_level = "full", c_out;
    bool c_prov = false;
    compile->add_option("--scene", c_scene, "scene JSON")->required();
    compile->add_option("--kb", c_kb, "knowledge base (.vkb)")->required();
    compile->add_option("--task", c_task, "task name")->required();
    compile->add_option("--level", c_level,
                        "standard|modular|depgraph|ground|full");
    compile->add_option("--out", c_out, "artifact file (default stdout)");
    compile->add_flag("--dump-provenance", c_prov,
                      "print everything each stage dropped");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "produce an action plan");
    std::string p_scene, p_kb, p_task, p_level = "full", p_compiled, p_out,
                p_justify_out;
    bool p_justify = false, p_no_fallback = false;
    plan_cmd->add_option("--scene", p_scene, "scene JSON");
    plan_cmd->add_option("--kb", p_kb, "knowledge base (.vkb)");
    plan_cmd->add_option("--task", p_task, "task name");
    plan_cmd->add_option("--level", p_level,
                         "standard|modular|depgraph|ground|full");
    plan_cmd->add_option("--compiled", p_compiled,
                         "compiled artifact (replaces scene/kb/level)");
    plan_cmd->add_option("--out", p_out, "plan file (default stdout)");
    plan_cmd->add_flag("--justify", p_justify,
                       "print the justification trace");
    plan_cmd->add_option("--justify-out", p_justify_out,
                         "write the justification trace to a file");
    plan_cmd->add_flag("--no-fallback", p_no_fallback,
                       "fail instead of retrying at lower optimization");

    // exec
    auto* exec_cmd = app.add_subcommand("exec", "run a script in the simulator");
    std::string e_scene, e_kb, e_script;
    exec_cmd->add_option("--scene", e_scene, "scene JSON")->required();
    exec_cmd->add_option("--kb", e_kb, "knowledge base (.vkb)")->required();
    exec_cmd->add_option("--script", e_script, "script file")->required();

    // score
    auto* score_cmd =
        app.add_subcommand("score", "score a script against a task goal");
    std::string s_scene, s_kb, s_script, s_task;
    score_cmd->add_option("--scene", s_scene, "scene JSON")->required();
    score_cmd->add_option("--kb", s_kb, "knowledge base (.vkb)")->required();
    score_cmd->add_option("--script", s_script, "script file")->required();
    score_cmd->add_option("--task", s_task, "task name")->required();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "timing sweep, CSV output");
    std::string b_scene, b_kb, b_tasks, b_levels, b_csv;
    int b_reps = 5;
    double b_timeout = 600.0;
    bench_cmd->add_option("--scene", b_scene, "scene JSON")->required();
    bench_cmd->add_option("--kb", b_kb, "knowledge base (.vkb)")->required();
    bench_cmd->add_option("--tasks", b_tasks,
                          "comma-separated task names (default: all)");
    bench_cmd->add_option("--levels", b_levels,
                          "comma-separated levels (default: all)");
    bench_cmd->add_option("--reps", b_reps, "plans per cell (default 5)");
    bench_cmd->add_option("--timeout", b_timeout,
                          "per-plan timeout seconds (default 600)");
    bench_cmd->add_option("--csv", b_csv, "CSV file (default stdout)");

    // generalize
    auto* gen_cmd =
        app.add_subcommand("generalize", "solve a directory of holdout tasks");
    std::string g_scene, g_kb, g_dir, g_extra, g_level = "full", g_report;
    int g_parallel = 1;
    gen_cmd->add_option("--scene", g_scene, "scene JSON")->required();
    gen_cmd->add_option("--kb", g_kb, "knowledge base (.vkb)")->required();
    gen_cmd->add_option("--holdout", g_dir, "directory of task .vkb files")
        ->required();
    gen_cmd->add_option("--extra", g_extra,
                        "additional rules appended to the KB");
    gen_cmd->add_option("--level", g_level,
                        "standard|modular|depgraph|ground|full");
    gen_cmd->add_option("--parallel", g_parallel,
                        "worker threads (planning only, not timing)");
    gen_cmd->add_option("--report", g_report, "report file (default stdout)");

    // gen-scene
    auto* gs_cmd =
        app.add_subcommand("gen-scene", "grow a synthetic scene document");
    std::string gs_base, gs_out;
    int gs_objects = 500;
    unsigned gs_seed = 7;
    gs_cmd->add_option("--base", gs_base,
                       "base scene to extend (default: empty 5-room shell)");
    gs_cmd->add_option("--objects", gs_objects,
                       "total node count (default 500)");
    gs_cmd->add_option("--seed", gs_seed, "RNG seed (default 7)");
    gs_cmd->add_option("--out", gs_out, "output scene (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Defaults defaults = load_defaults(config_path);

        if (*ingest)
            return cmd_ingest(in_scene, in_out);
        if (*compile)
            return cmd_compile(c_scene, c_kb, c_task, c_level, c_out, c_prov);
        if (*plan_cmd) {
            PlanLimits limits = make_limits(defaults);
            if (!p_compiled.empty()) {
                std::string task_name;
                CompiledKB kb = artifact_from_json(
                    json::parse(read_file(p_compiled)), task_name);
                TaskDef task;
                task.name = intern(task_name);
                task.goal = kb.goal;
                return report_plan(kb, task, limits, false, kb.program,
                                   kb.facts, nullptr, p_out, p_justify,
                                   p_justify_out);
            }
            if (p_scene.empty() || p_kb.empty() || p_task.empty())
                throw IoError("plan needs --scene, --kb and --task "
                              "(or --compiled)");
            SceneGraph scene = ingest_scene_file(p_scene);
            FactBase facts = to_facts(scene);
            facts.state = initial_state(facts, scene);
            Program program = parse_program_file(p_kb);
            const TaskDef& task = need_task(program, p_task);
            CompiledKB kb =
                optimize(program, facts, scene, task, need_level(p_level));
            for (const std::string& w : kb.warnings)
                std::cerr << "warning: " << w << '\n';
            return report_plan(kb, task, limits, !p_no_fallback, program,
                               facts, &scene, p_out, p_justify, p_justify_out);
        }
        if (*exec_cmd)
            return cmd_exec(e_scene, e_kb, e_script);
        if (*score_cmd)
            return cmd_score(s_scene, s_kb, s_script, s_task);
        if (*bench_cmd)
            return cmd_bench(b_scene, b_kb, b_tasks, b_levels, b_reps,
                             b_timeout, defaults, b_csv);
        if (*gen_cmd)
            return cmd_generalize(g_scene, g_kb, g_dir, g_extra, g_level,
                                  g_parallel, defaults, g_report);
        if (*gs_cmd)
            return cmd_gen_scene(gs_base, gs_objects, gs_seed, gs_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
