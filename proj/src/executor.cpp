#include "vecsr/executor.hpp"

#include "vecsr/parser.hpp"
#include "vecsr/solver.hpp"
#include "vecsr/world_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace vecsr {
namespace {

using PK = CatPre::Kind;

struct TagRow {
    CatAction action;
    const char* tag;
    int arity;
};

constexpr TagRow kTags[kCatActionCount] = {
    {CatAction::Walk, "Walk", 1},
    {CatAction::Find, "Find", 1},
    {CatAction::Grab, "Grab", 1},
    {CatAction::PutBack, "PutBack", 2},
    {CatAction::PutOn, "PutOn", 2},
    {CatAction::SwitchOn, "SwitchOn", 1},
    {CatAction::SwitchOff, "SwitchOff", 1},
    {CatAction::Open, "Open", 1},
    {CatAction::Close, "Close", 1},
    {CatAction::Sit, "Sit", 1},
    {CatAction::StandUp, "StandUp", 0},
    {CatAction::Lie, "Lie", 1},
    {CatAction::Touch, "Touch", 1},
    {CatAction::Rinse, "Rinse", 1},
    {CatAction::Scrub, "Scrub", 1},
    {CatAction::Pour, "Pour", 2},
    {CatAction::Drink, "Drink", 1},
    {CatAction::TypeOn, "TypeOn", 1},
    {CatAction::ReadTo, "ReadTo", 1},
};

CatPre static_tag(const char* pred, int arg) {
    return CatPre{PK::StaticTag, intern(pred), RelationKind::Holds, arg};
}

CatPre member(RelationKind rel, int arg) {
    return CatPre{PK::Member, kNoSymbol, rel, arg};
}

CatPre absent(RelationKind rel, int arg) {
    return CatPre{PK::Absent, kNoSymbol, rel, arg};
}

CatPre check(PK kind, int arg = 0) {
    return CatPre{kind, kNoSymbol, RelationKind::Holds, arg};
}

std::vector<CatEntry> build_catalog() {
    using R = RelationKind;
    std::vector<CatEntry> t;
    // Walk and Find get their closure/relocation behavior in apply_step; the
    // table rows carry their checkable preconditions.
    t.push_back({CatAction::Walk, {check(PK::Standing)}, {}, {}});
    t.push_back({CatAction::Find, {check(PK::SameRoom)}, {}, {}});
    t.push_back({CatAction::Grab,
                 {static_tag("grabbable", 0), member(R::Close, 0),
                  absent(R::Holds, 0), check(PK::Accessible),
                  check(PK::HandsFree)},
                 {{R::Holds, {0}}},
                 {{R::OnTopOf, {0, -1}}, {R::Inside, {0, -1}}}});
    t.push_back({CatAction::PutBack,
                 {member(R::Holds, 0), member(R::Close, 1),
                  static_tag("can_open", 1), member(R::Open, 1)},
                 {{R::Inside, {0, 1}}},
                 {{R::Holds, {0}}}});
    t.push_back({CatAction::PutOn,
                 {member(R::Holds, 0), static_tag("surface", 1),
                  member(R::Close, 1)},
                 {{R::OnTopOf, {0, 1}}},
                 {{R::Holds, {0}}}});
    t.push_back({CatAction::SwitchOn,
                 {static_tag("has_switch", 0), member(R::Close, 0),
                  absent(R::On, 0)},
                 {{R::On, {0}}},
                 {}});
    t.push_back({CatAction::SwitchOff,
                 {static_tag("has_switch", 0), member(R::Close, 0),
                  member(R::On, 0)},
                 {},
                 {{R::On, {0}}}});
    t.push_back({CatAction::Open,
                 {static_tag("can_open", 0), member(R::Close, 0),
                  absent(R::Open, 0)},
                 {{R::Open, {0}}},
                 {}});
    t.push_back({CatAction::Close,
                 {static_tag("can_open", 0), member(R::Close, 0),
                  member(R::Open, 0)},
                 {},
                 {{R::Open, {0}}}});
    t.push_back({CatAction::Sit,
                 {static_tag("sittable", 0), member(R::Close, 0),
                  check(PK::Standing)},
                 {{R::Sitting, {0}}},
                 {}});
    t.push_back({CatAction::StandUp,
                 {check(PK::PostureDown)},
                 {},
                 {{R::Sitting, {-1}}, {R::Lying, {-1}}}});
    t.push_back({CatAction::Lie,
                 {static_tag("lieable", 0), member(R::Close, 0),
                  check(PK::Standing)},
                 {{R::Lying, {0}}},
                 {}});
    t.push_back({CatAction::Touch, {member(R::Close, 0)}, {}, {}});
    t.push_back({CatAction::Rinse,
                 {member(R::Holds, 0), check(PK::WaterRunning)},
                 {{R::Clean, {0}}},
                 {}});
    t.push_back({CatAction::Scrub,
                 {member(R::Holds, 0), member(R::Dirty, 0)},
                 {},
                 {{R::Dirty, {0}}}});
    t.push_back({CatAction::Pour,
                 {member(R::Holds, 0), member(R::Close, 1)},
                 {},
                 {}});
    t.push_back({CatAction::Drink, {member(R::Holds, 0)}, {}, {}});
    t.push_back({CatAction::TypeOn,
                 {member(R::Close, 0), member(R::On, 0)},
                 {},
                 {}});
    t.push_back({CatAction::ReadTo, {member(R::Holds, 0)}, {}, {}});
    return t;
}

// ---- world scanning helpers (engine-level, no logic engine) ----

struct ObjectIdLess {
    bool operator()(const ObjectId& a, const ObjectId& b) const {
        return object_less(a, b);
    }
};

using ObjectSet = std::set<ObjectId, ObjectIdLess>;

ObjectSet room_set(const FactBase& f) {
    ObjectSet rooms;
    const Symbol cat = rooms_category();
    for (const StaticFact& sf : f.statics)
        if (sf.predicate == cat && !sf.negated)
            rooms.insert(sf.subject);
    return rooms;
}

bool object_exists(const FactBase& f, const ObjectId& o) {
    for (const StaticFact& sf : f.statics)
        if (sf.subject == o)
            return true;
    return false;
}

bool is_held(const StateRecord& s, const ObjectId& o) {
    return s.contains(RelationKind::Holds, {o});
}

std::optional<ObjectId> direct_support(const StateRecord& s, const ObjectId& o) {
    for (const Tuple& t : s.list(RelationKind::Inside))
        if (t.size() == 2 && t[0] == o)
            return t[1];
    for (const Tuple& t : s.list(RelationKind::OnTopOf))
        if (t.size() == 2 && t[0] == o)
            return t[1];
    return std::nullopt;
}

// Follows the support chain upward until a room; held links count as being
// wherever the agent is.
std::optional<ObjectId> chain_room(const StateRecord& s, const ObjectId& start,
                                   const ObjectSet& rooms,
                                   const ObjectId& agent) {
    ObjectId cur = start;
    for (int hops = 0; hops < 64; ++hops) {
        if (rooms.count(cur))
            return cur;
        if (is_held(s, cur) || cur == agent) {
            for (const Tuple& t : s.list(RelationKind::Inside))
                if (t.size() == 2 && t[0] == agent && rooms.count(t[1]))
                    return t[1];
            return std::nullopt;
        }
        auto up = direct_support(s, cur);
        if (!up)
            return std::nullopt;
        cur = *up;
    }
    return std::nullopt;
}

// The proximity neighborhood of x: x plus everything linked through
// on_top_of/inside support edges in either direction, never through rooms or
// the agent.
std::vector<ObjectId> support_chain(const StateRecord& s, const ObjectId& x,
                                    const ObjectSet& rooms,
                                    const ObjectId& agent) {
    std::vector<ObjectId> out;
    ObjectSet seen;
    std::deque<ObjectId> work{x};
    seen.insert(x);
    while (!work.empty()) {
        ObjectId cur = work.front();
        work.pop_front();
        out.push_back(cur);
        auto visit = [&](const ObjectId& n) {
            if (rooms.count(n) || n == agent || seen.count(n))
                return;
            seen.insert(n);
            work.push_back(n);
        };
        for (RelationKind rel : {RelationKind::OnTopOf, RelationKind::Inside})
            for (const Tuple& t : s.list(rel)) {
                if (t.size() != 2)
                    continue;
                if (t[0] == cur)
                    visit(t[1]);
                else if (t[1] == cur)
                    visit(t[0]);
            }
    }
    return out;
}

bool water_running(const FactBase& f, const StateRecord& s) {
    const Symbol faucet = intern("faucet");
    for (const Tuple& t : s.list(RelationKind::On))
        if (t.size() == 1 && f.has_type(t[0], faucet))
            return true;
    return false;
}

std::string render_tuple(RelationKind rel, const Tuple& t) {
    std::string out = relation_name(rel);
    out += '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ", ";
        out += render_object(t[i]);
    }
    out += ')';
    return out;
}

// Empty string when the check passes; otherwise the failing literal text.
std::string check_pre(const CatPre& pre, const ScriptStep& step,
                      const WorldModel& w, const StateRecord& s,
                      const ObjectSet& rooms) {
    const ObjectId agent = w.scene.agent;
    auto arg = [&](int i) { return step.args[static_cast<std::size_t>(i)]; };
    switch (pre.kind) {
    case PK::StaticTag:
        if (w.facts.has_tag(pre.pred, arg(pre.arg)))
            return {};
        return symbol_name(pre.pred) + "(" + render_object(arg(pre.arg)) + ")";
    case PK::Member:
        if (s.contains(pre.rel, {arg(pre.arg)}))
            return {};
        return render_tuple(pre.rel, {arg(pre.arg)});
    case PK::Absent:
        if (!s.contains(pre.rel, {arg(pre.arg)}))
            return {};
        return "not " + render_tuple(pre.rel, {arg(pre.arg)});
    case PK::SameRoom: {
        auto obj_room = chain_room(s, arg(pre.arg), rooms, agent);
        auto agent_room = chain_room(s, agent, rooms, agent);
        if (obj_room && agent_room && *obj_room == *agent_room)
            return {};
        return "same_room(" + render_object(arg(pre.arg)) + ")";
    }
    case PK::Accessible: {
        auto container = [&]() -> std::optional<ObjectId> {
            for (const Tuple& t : s.list(RelationKind::Inside))
                if (t.size() == 2 && t[0] == arg(pre.arg) &&
                    !rooms.count(t[1]))
                    return t[1];
            return std::nullopt;
        }();
        if (!container || !w.facts.has_tag(intern("can_open"), *container) ||
            s.contains(RelationKind::Open, {*container}))
            return {};
        return "accessible(" + render_object(arg(pre.arg)) + ")";
    }
    case PK::HandsFree:
        if (s.list(RelationKind::Holds).size() < 2)
            return {};
        return "hands_free";
    case PK::Standing:
        if (s.list(RelationKind::Sitting).empty() &&
            s.list(RelationKind::Lying).empty())
            return {};
        return "not busy";
    case PK::PostureDown:
        if (!s.list(RelationKind::Sitting).empty() ||
            !s.list(RelationKind::Lying).empty())
            return {};
        return "busy";
    case PK::WaterRunning:
        if (water_running(w.facts, s))
            return {};
        return "water_running";
    }
    return "unreachable";
}

void apply_generic(const CatEntry& entry, const ScriptStep& step,
                   StateRecord& s) {
    auto arg = [&](int i) { return step.args[static_cast<std::size_t>(i)]; };
    for (const CatEffect& e : entry.del) {
        std::vector<Tuple>& lst = s.list(e.rel);
        lst.erase(std::remove_if(lst.begin(), lst.end(),
                                 [&](const Tuple& t) {
                                     if (t.size() != e.args.size())
                                         return false;
                                     for (std::size_t i = 0; i < t.size(); ++i)
                                         if (e.args[i] != -1 &&
                                             t[i] != arg(e.args[i]))
                                             return false;
                                     return true;
                                 }),
                  lst.end());
    }
    for (const CatEffect& e : entry.add) {
        Tuple t;
        for (int i : e.args)
            t.push_back(arg(i));
        s.add(e.rel, t);
    }
}

void apply_step(const CatEntry& entry, const ScriptStep& step, WorldModel& w,
                StateRecord& s, const ObjectSet& rooms) {
    const ObjectId agent = w.scene.agent;
    switch (entry.action) {
    case CatAction::Walk: {
        const ObjectId target = step.args[0];
        s.list(RelationKind::Close).clear();
        if (rooms.count(target)) {
            std::vector<Tuple>& ins = s.list(RelationKind::Inside);
            ins.erase(std::remove_if(ins.begin(), ins.end(),
                                     [&](const Tuple& t) {
                                         return t.size() == 2 && t[0] == agent;
                                     }),
                      ins.end());
            s.add(RelationKind::Inside, {agent, target});
            s.add(RelationKind::Close, {target});
            return;
        }
        auto there = chain_room(s, target, rooms, agent);
        auto here = chain_room(s, agent, rooms, agent);
        if (there && (!here || *there != *here)) {
            std::vector<Tuple>& ins = s.list(RelationKind::Inside);
            ins.erase(std::remove_if(ins.begin(), ins.end(),
                                     [&](const Tuple& t) {
                                         return t.size() == 2 && t[0] == agent;
                                     }),
                      ins.end());
            s.add(RelationKind::Inside, {agent, *there});
        }
        for (const ObjectId& o : support_chain(s, target, rooms, agent))
            s.add(RelationKind::Close, {o});
        return;
    }
    case CatAction::Find: {
        for (const ObjectId& o : support_chain(s, step.args[0], rooms, agent))
            s.add(RelationKind::Close, {o});
        return;
    }
    default:
        apply_generic(entry, step, s);
    }
}

std::vector<std::string> tuple_diff(const StateRecord& before,
                                    const StateRecord& after, bool added) {
    const StateRecord& from = added ? before : after;
    const StateRecord& to = added ? after : before;
    std::vector<std::string> out;
    for (RelationKind rel : all_relations()) {
        std::vector<Tuple> sorted = to.list(rel);
        std::sort(sorted.begin(), sorted.end(), tuple_less);
        for (const Tuple& t : sorted)
            if (!from.contains(rel, t))
                out.push_back(render_tuple(rel, t));
    }
    return out;
}

} // namespace

const char* cat_action_tag(CatAction a) {
    return kTags[static_cast<std::size_t>(a)].tag;
}

std::optional<CatAction> cat_action_from_tag(std::string_view tag) {
    for (const TagRow& row : kTags)
        if (tag == row.tag)
            return row.action;
    return std::nullopt;
}

int cat_action_arity(CatAction a) {
    return kTags[static_cast<std::size_t>(a)].arity;
}

const std::vector<CatEntry>& action_catalog() {
    static const std::vector<CatEntry> table = build_catalog();
    return table;
}

std::string render_script_step(const ScriptStep& s) {
    std::string out = "[";
    out += cat_action_tag(s.action);
    out += ']';
    for (const ObjectId& o : s.args) {
        out += " <";
        out += symbol_name(o.name);
        out += "> (";
        out += std::to_string(o.index);
        out += ")";
    }
    return out;
}

ScriptParse parse_script(const std::string& text) {
    ScriptParse result;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        result.ok = false;
        result.bad_line = line_no;
        result.error = why;
        return result;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos)
            continue;
        if (line[i] != '[')
            return fail("expected '[' starting an action tag");
        std::size_t close_tag = line.find(']', i);
        if (close_tag == std::string::npos)
            return fail("unterminated action tag");
        std::string tag = line.substr(i + 1, close_tag - i - 1);
        auto action = cat_action_from_tag(tag);
        if (!action)
            return fail("unknown action tag [" + tag + "]");
        ScriptStep step;
        step.action = *action;
        std::size_t pos = close_tag + 1;
        while (true) {
            std::size_t lt = line.find('<', pos);
            if (lt == std::string::npos)
                break;
            std::size_t gt = line.find('>', lt);
            if (gt == std::string::npos)
                return fail("unterminated object name");
            std::string name = line.substr(lt + 1, gt - lt - 1);
            if (name.empty())
                return fail("empty object name");
            std::size_t lp = line.find('(', gt);
            if (lp == std::string::npos)
                return fail("missing object index after <" + name + ">");
            std::size_t rp = line.find(')', lp);
            if (rp == std::string::npos)
                return fail("unterminated object index");
            std::string num = line.substr(lp + 1, rp - lp - 1);
            if (num.empty() ||
                num.find_first_not_of("0123456789") != std::string::npos)
                return fail("object index is not a number: (" + num + ")");
            step.args.push_back(
                ObjectId{intern(name), std::stoi(num)});
            pos = rp + 1;
        }
        if (static_cast<int>(step.args.size()) != cat_action_arity(*action))
            return fail(std::string(cat_action_tag(*action)) + " expects " +
                        std::to_string(cat_action_arity(*action)) +
                        " argument(s)");
        std::size_t rest = line.find_first_not_of(" \t\r", pos);
        if (rest != std::string::npos)
            return fail("trailing text after action arguments");
        result.script.steps.push_back(std::move(step));
    }
    result.ok = true;
    return result;
}

WorldModel make_world(SceneGraph scene, Program program) {
    WorldModel w;
    w.scene = std::move(scene);
    w.program = std::move(program);
    w.facts = to_facts(w.scene);
    w.facts.state = initial_state(w.facts, w.scene);
    w.initial = w.facts.state;
    return w;
}

void reset(WorldModel& w) {
    w.facts.state = w.initial;
}

ExecutionResult execute(WorldModel& w, const Script& script) {
    ExecutionResult result;
    const ObjectSet rooms = room_set(w.facts);
    const std::vector<CatEntry>& catalog = action_catalog();

    int step_no = 0;
    for (const ScriptStep& step : script.steps) {
        ++step_no;
        StepLog log;
        log.step = step_no;
        log.action = render_script_step(step);

        std::string reason;
        for (const ObjectId& o : step.args)
            if (!object_exists(w.facts, o)) {
                reason = "unknown object " + render_object(o);
                break;
            }
        const CatEntry& entry =
            catalog[static_cast<std::size_t>(step.action)];
        if (reason.empty())
            for (const CatPre& pre : entry.pre) {
                reason = check_pre(pre, step, w, w.facts.state, rooms);
                if (!reason.empty())
                    break;
            }
        if (!reason.empty()) {
            log.ok = false;
            log.reason = reason;
            result.log.push_back(std::move(log));
            result.completed = false;
            result.failed_step = step_no;
            result.reason = reason;
            result.final_state = w.facts.state;
            return result;
        }

        StateRecord before = w.facts.state;
        apply_step(entry, step, w, w.facts.state, rooms);
        log.ok = true;
        log.added = tuple_diff(before, w.facts.state, true);
        log.removed = tuple_diff(before, w.facts.state, false);
        result.log.push_back(std::move(log));
    }
    result.completed = true;
    result.final_state = w.facts.state;
    return result;
}

ExecutionResult execute(WorldModel& w, const Plan& plan) {
    ScriptParse parsed = parse_script(render_plan(w.program, plan));
    if (!parsed.ok) {
        ExecutionResult result;
        result.completed = false;
        result.failed_step = parsed.bad_line;
        result.reason = parsed.error;
        result.final_state = w.facts.state;
        return result;
    }
    return execute(w, parsed.script);
}

std::string render_execution_log(const ExecutionResult& r) {
    std::string out;
    for (const StepLog& sl : r.log) {
        nlohmann::json j;
        j["step"] = sl.step;
        j["action"] = sl.action;
        j["ok"] = sl.ok;
        j["diff"] = {{"added", sl.added}, {"removed", sl.removed}};
        if (!sl.ok)
            j["reason"] = sl.reason;
        out += j.dump();
        out += '\n';
    }
    return out;
}

ScriptScore score_script(const WorldModel& w, const std::string& script_text,
                         const TaskDef& task) {
    ScriptScore score;
    ScriptParse parsed = parse_script(script_text);
    if (!parsed.ok) {
        score.first_bad_step = parsed.bad_line;
        score.reason = parsed.error;
        return score;
    }
    score.parsed = true;

    WorldModel copy = w;
    ExecutionResult run = execute(copy, parsed.script);
    if (!run.completed) {
        score.first_bad_step = run.failed_step;
        score.reason = run.reason;
        return score;
    }
    score.executable = true;
    score.correct =
        provable(copy.program, copy.facts, run.final_state, task.goal);
    return score;
}

} // namespace vecsr
