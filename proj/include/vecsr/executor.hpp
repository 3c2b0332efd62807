#pragma once

#include "vecsr/planner.hpp"
#include "vecsr/scene.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vecsr {

// The simulator's fixed mid-level action vocabulary. Plan text tags map onto
// these one-to-one ([PutBack] -> PutBack); KB action schemas must tag into
// this set.
enum class CatAction : std::uint8_t {
    Walk,
    Find,
    Grab,
    PutBack,
    PutOn,
    SwitchOn,
    SwitchOff,
    Open,
    Close,
    Sit,
    StandUp,
    Lie,
    Touch,
    Rinse,
    Scrub,
    Pour,
    Drink,
    TypeOn,
    ReadTo,
};

constexpr std::size_t kCatActionCount = 19;

const char* cat_action_tag(CatAction a); // "Walk", "PutBack", ...
std::optional<CatAction> cat_action_from_tag(std::string_view tag);
int cat_action_arity(CatAction a);

// One precondition of a catalog action, engine-level. The simulator checks
// these directly against the world record; no logic engine is involved, which
// keeps it an independent second implementation of the action semantics.
struct CatPre {
    enum class Kind : std::uint8_t {
        StaticTag,      // statics: pred(arg) must hold, e.g. grabbable
        Member,         // dynamic relation contains the arg tuple
        Absent,         // dynamic relation lacks the arg tuple
        SameRoom,       // arg shares the agent's room (or is held)
        Accessible,     // arg is not inside a closed openable container
        HandsFree,      // fewer than two objects held
        Standing,       // no sitting/lying tuple
        PostureDown,    // some sitting or lying tuple
        WaterRunning,   // some faucet-class object is switched on
    };
    Kind kind;
    Symbol pred = kNoSymbol; // StaticTag predicate
    RelationKind rel = RelationKind::Holds;
    int arg = 0; // argument index the check applies to
};

struct CatEffect {
    RelationKind rel;
    std::vector<int> args; // argument indices; -1 is a wildcard (del only)
};

// One row of the catalog table: the authoritative pre/add/del semantics of a
// mid-level action. Walk and Find additionally run the proximity closure
// (close to the target plus its support chain) and, for walk, relocation.
struct CatEntry {
    CatAction action;
    std::vector<CatPre> pre;
    std::vector<CatEffect> add;
    std::vector<CatEffect> del;
};

// The full 19-row table, indexed by CatAction.
const std::vector<CatEntry>& action_catalog();

struct ScriptStep {
    CatAction action;
    std::vector<ObjectId> args;

    bool operator==(const ScriptStep&) const = default;
};

struct Script {
    std::vector<ScriptStep> steps;
};

std::string render_script_step(const ScriptStep& s);

// Outcome of parsing plan text: on failure, the 1-based line and a message.
struct ScriptParse {
    bool ok = false;
    Script script;
    int bad_line = 0;
    std::string error;
};

ScriptParse parse_script(const std::string& text);

// The authoritative simulated household: scene, KB (used only to evaluate
// task goals and tag lookups), live dynamic state, and the pristine initial
// state for reset.
struct WorldModel {
    SceneGraph scene;
    Program program;
    FactBase facts; // facts.state is the live state
    StateRecord initial;
};

WorldModel make_world(SceneGraph scene, Program program);

// Restores the live state to the ingested initial state, exactly.
void reset(WorldModel& w);

struct StepLog {
    int step = 0;       // 1-based
    std::string action; // plan text form
    bool ok = false;
    std::vector<std::string> added;   // tuple diffs, "close(mug3)"
    std::vector<std::string> removed;
    std::string reason; // failing precondition when !ok
};

struct ExecutionResult {
    bool completed = false;
    int failed_step = 0;    // 1-based; 0 when completed
    std::string reason;     // failing precondition literal text
    StateRecord final_state;
    std::vector<StepLog> log;
};

// Runs the script against the live state, stopping at the first step whose
// preconditions fail; the world keeps the state reached so far.
ExecutionResult execute(WorldModel& w, const Script& script);

// Renders the plan to script text and executes it (tags resolved through the
// world's program).
ExecutionResult execute(WorldModel& w, const Plan& plan);

// One JSON object per step: {"step", "action", "ok", "diff": {...}}.
std::string render_execution_log(const ExecutionResult& r);

struct ScriptScore {
    bool parsed = false;
    bool executable = false;
    bool correct = false;
    std::optional<int> first_bad_step; // script line of the failure
    std::string reason;
};

// Scores a script on a copy of the world: parsed per the plan text grammar,
// executable iff every step applies, correct iff the task goal holds at the
// end. correct implies executable implies parsed.
ScriptScore score_script(const WorldModel& w, const std::string& script_text,
                         const TaskDef& task);

} // namespace vecsr
